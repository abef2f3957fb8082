// Command-line surface: batch commands that tie the library together and
// emit reproducible JSON/CSV/plot-data reports.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "convlab/convex_fit.hpp"
#include "convlab/covering.hpp"
#include "convlab/defect.hpp"
#include "convlab/errors.hpp"
#include "convlab/format.hpp"
#include "convlab/gallery.hpp"
#include "convlab/grid_domain.hpp"
#include "convlab/lift.hpp"
#include "convlab/report_io.hpp"
#include "convlab/rng.hpp"

namespace convlab {
namespace {

using Clock = std::chrono::steady_clock;

constexpr const char* kRegistryHelp =
    "entropy, simplex_max, ribe, kalton, omega, sqnorm, norm:{sup|l1|l2}, "
    "neglog:{sup|l1|l2}, fstar:nested, fstar:blocks:SIZES (e.g. fstar:blocks:2,2), "
    "affine:a1,...,ad,b, const:V, file:PATH";

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const int lo = std::stoi(text.substr(0, dots));
    const int hi = std::stoi(text.substr(dots + 2));
    if (hi < lo) throw ParameterError("empty range '" + text + "'");
    for (int v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  if (out.empty()) throw ParameterError("empty list '" + text + "'");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

std::shared_ptr<const GridDomain> make_domain(const std::string& body, int dim, int k) {
  const BodyKind kind = body_kind_from_name(body);
  const GridLimits limits = GridLimits::from_env();
  switch (kind) {
    case BodyKind::Simplex: return std::make_shared<const GridDomain>(make_simplex_grid(dim, k, limits));
    case BodyKind::Cube: return std::make_shared<const GridDomain>(make_cube_grid(dim, k, limits));
    case BodyKind::BallSup:
    case BodyKind::BallEuclid:
      return std::make_shared<const GridDomain>(make_ball_grid(dim, k, kind, limits));
    case BodyKind::PositiveConeSection:
      return std::make_shared<const GridDomain>(make_positive_section_grid(dim, k, limits));
  }
  throw ParameterError("unknown body '" + body + "'");
}

/// Resolves a registry name to a pointwise evaluator.
PointEvaluator resolve_function(const std::string& name) {
  auto starts = [&](const char* prefix) { return name.rfind(prefix, 0) == 0; };
  if (name == "entropy") return [](std::span<const double> x) { return entropy_simplex(x); };
  if (name == "simplex_max") return [](std::span<const double> x) { return simplex_max_counterexample(x); };
  if (name == "ribe") return [](std::span<const double> x) { return ribe(SparseVector::from_dense(x)); };
  if (name == "kalton") {
    return [](std::span<const double> x) { return kalton_map(SparseVector::from_dense(x)); };
  }
  if (name == "omega") {
    return [](std::span<const double> x) {
      return static_cast<double>(cholewa_kominek_omega(SparseVector::from_dense(x)));
    };
  }
  if (name == "sqnorm") {
    return [](std::span<const double> x) {
      double s = 0;
      for (double v : x) s += v * v;
      return s;
    };
  }
  if (starts("norm:") || starts("neglog:")) {
    const bool neg = starts("neglog:");
    const NormKind kind = norm_kind_from_name(name.substr(name.find(':') + 1));
    return [neg, kind](std::span<const double> x) {
      const auto v = SparseVector::from_dense(x);
      return neg ? neg_log_norm(v, kind) : v.norm(kind);
    };
  }
  if (starts("fstar:")) {
    const std::string rest = name.substr(6);
    if (rest == "nested") {
      return [](std::span<const double> x) { return f_star(x, FStarConfig::nested()); };
    }
    if (rest.rfind("blocks:", 0) == 0) {
      auto sizes = parse_int_list(rest.substr(7));
      const FStarConfig cfg = FStarConfig::blocks(std::move(sizes));
      return [cfg](std::span<const double> x) { return f_star(x, cfg); };
    }
    throw ParameterError("fstar variant must be 'nested' or 'blocks:SIZES'");
  }
  if (starts("affine:")) {
    const auto coeffs = parse_double_list(name.substr(7));
    if (coeffs.empty()) throw ParameterError("affine needs coefficients a1,..,ad,b");
    return [coeffs](std::span<const double> x) {
      double acc = coeffs.back();
      for (std::size_t i = 0; i + 1 < coeffs.size(); ++i) acc += coeffs[i] * x[i];
      return acc;
    };
  }
  if (starts("const:")) {
    const double v = std::stod(name.substr(6));
    return [v](std::span<const double>) { return v; };
  }
  throw ParameterError("unknown function '" + name + "'; registry: " + std::string(kRegistryHelp));
}

SampledFunction build_sample(std::shared_ptr<const GridDomain> domain, const std::string& fn,
                             double noise, std::uint64_t seed, bool exclude_origin) {
  std::vector<double> values(domain->size());
  if (fn.rfind("file:", 0) == 0) {
    const auto loaded =
        nlohmann::json::parse(read_text_file(fn.substr(5))).get<std::vector<double>>();
    if (loaded.size() != domain->size()) {
      throw ParameterError("value file holds " + std::to_string(loaded.size()) + " values, grid has " +
                           std::to_string(domain->size()));
    }
    values = loaded;
  } else {
    const PointEvaluator eval = resolve_function(fn);
    for (std::size_t i = 0; i < domain->size(); ++i) {
      const auto x = domain->point_values(i);
      bool is_origin = true;
      for (double v : x) {
        if (v != 0) {
          is_origin = false;
          break;
        }
      }
      values[i] = (exclude_origin && is_origin) ? 0.0 : eval(x);
    }
  }
  if (noise > 0) {
    Rng rng(seed);
    for (auto& v : values) v += rng.uniform(-noise, noise);
  }
  return SampledFunction(std::move(domain), std::move(values));
}

/// Drops triples touching the origin point (used with --exclude-origin).
TripleSet drop_origin(TripleSet set) {
  const auto& d = *set.domain;
  std::size_t origin = GridDomain::npos;
  for (std::size_t i = 0; i < d.size(); ++i) {
    bool zero = true;
    for (auto c : d.point(i)) {
      if (c != 0) {
        zero = false;
        break;
      }
    }
    if (zero) {
      origin = i;
      break;
    }
  }
  if (origin == GridDomain::npos) return set;
  std::erase_if(set.triples, [origin](const ConvexTriple& t) {
    return t.x_id == origin || t.y_id == origin || t.combo_id == origin;
  });
  return set;
}

struct ManifestScope {
  RunManifest manifest;
  Clock::time_point start = Clock::now();
  std::string path;

  void add(const std::string& key, const std::string& value) { manifest.parameters[key] = value; }
  void output(const std::string& file) { manifest.outputs.push_back(file); }
  void finish() {
    if (path.empty()) return;
    manifest.version = kVersion;
    manifest.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    write_text_file(path, manifest.to_json());
  }
};

void emit(const std::string& path, const std::string& content, ManifestScope& scope) {
  if (path.empty()) return;
  write_text_file(path, content);
  scope.output(path);
}

int run(int argc, char** argv) {
  CLI::App app{"approximate-convexity toolbox"};
  app.require_subcommand(1);

  std::string body = "cube", fn = "entropy", kind = "convex", cls = "convex";
  int dim = 2, k = 2, t_power = -1, steps = 20;
  double noise = 0, M = 200, eps_d = 0;
  std::uint64_t seed = 1;
  bool exclude_origin = false;
  std::string out, dat_out, manifest_path, eps_text = "1", p_text = "1/2", n_text = "2,3,4";
  std::string family = "omega", target_text;

  auto add_domain_flags = [&](CLI::App* cmd) {
    cmd->add_option("--body", body, "simplex|cube|ball_sup|ball_euclid|positive_cone_section");
    cmd->add_option("--dim", dim, "coordinate count");
    cmd->add_option("--k", k, "dyadic resolution: coordinates are multiples of 2^-k");
  };
  auto add_fn_flags = [&](CLI::App* cmd) {
    cmd->add_option("--fn", fn, std::string("function name: ") + kRegistryHelp);
    cmd->add_option("--noise", noise, "add seeded uniform noise of this amplitude");
    cmd->add_option("--seed", seed, "seed for every random draw");
    cmd->add_flag("--exclude-origin", exclude_origin,
                  "patch the origin value to 0 and drop test triples touching it");
  };
  auto add_out_flags = [&](CLI::App* cmd) {
    cmd->add_option("--out", out, "report file");
    cmd->add_option("--dat", dat_out, "whitespace plot data file");
    cmd->add_option("--manifest", manifest_path, "write a reproducibility manifest here");
  };

  auto* c_defect = app.add_subcommand("defect", "measure a convexity/affinity/Jensen defect");
  add_domain_flags(c_defect);
  add_fn_flags(c_defect);
  add_out_flags(c_defect);
  c_defect->add_option("--kind", kind, "convex|affine|jensen");
  c_defect->add_option("--t-power", t_power, "t runs over multiples of 2^-j (default: k)");

  auto* c_distance = app.add_subcommand("distance", "distance to the convex/affine/Jensen class");
  add_domain_flags(c_distance);
  add_fn_flags(c_distance);
  add_out_flags(c_distance);
  c_distance->add_option("--class", cls, "convex|affine|jensen");

  auto* c_gallery = app.add_subcommand("gallery", "growth tables for the counterexample families");
  add_out_flags(c_gallery);
  c_gallery->add_option("--family", family, "omega|entropy|simplex_max|fstar");
  c_gallery->add_option("--n", n_text, "range 1..8 or list 2,4,8");

  auto* c_lift = app.add_subcommand("lift", "radial-lift affine recovery experiment");
  add_domain_flags(c_lift);
  add_fn_flags(c_lift);
  add_out_flags(c_lift);
  c_lift->add_option("--M", M, "assumed K-space constant");
  c_lift->add_option("--t-power", t_power, "t power for the defect measurement (default: k)");

  auto* c_tal = app.add_subcommand("talagrand", "covering-system lemmas and envelope gap table");
  add_out_flags(c_tal);
  c_tal->add_option("--eps", eps_text, "rational eps, e.g. 1 or 1/2");
  c_tal->add_option("--n", n_text, "block sizes, e.g. 2,3,4");
  c_tal->add_option("--p", p_text, "rational p in (0,1]");

  auto* c_pre = app.add_subcommand("preimage", "iterative preimage decay on the cube");
  add_out_flags(c_pre);
  c_pre->add_option("--dim", dim, "cube dimension");
  c_pre->add_option("--eps", eps_d, "oracle slack in (1/2+eps)");
  c_pre->add_option("--steps,--k", steps, "iteration count");
  c_pre->add_option("--p", p_text, "p for the coefficient p-sum");
  c_pre->add_option("--target", target_text, "comma-separated target (default: seeded random)");
  c_pre->add_option("--seed", seed, "seed for the random target");

  CLI11_PARSE(app, argc, argv);

  ManifestScope scope;
  scope.path = manifest_path;
  scope.manifest.seed = seed;

  if (c_defect->parsed()) {
    scope.manifest.command = "defect";
    scope.add("body", body);
    scope.add("dim", std::to_string(dim));
    scope.add("k", std::to_string(k));
    scope.add("fn", fn);
    scope.add("kind", kind);
    const int j = t_power < 0 ? k : t_power;
    scope.add("t_power", std::to_string(j));
    if (kind != "convex" && kind != "affine" && kind != "jensen") {
      throw ParameterError("kind must be convex|affine|jensen");
    }
    auto domain = make_domain(body, dim, k);
    const auto f = build_sample(domain, fn, noise, seed, exclude_origin);
    DefectReport report;
    if (kind == "jensen") {
      report = jensen_defect(f, enumerate_midpoint_pairs(domain, GridLimits::from_env()));
    } else {
      auto triples = enumerate_convex_triples(domain, j, GridLimits::from_env());
      if (exclude_origin) triples = drop_origin(std::move(triples));
      report = kind == "convex" ? convexity_defect(f, triples) : affinity_defect(f, triples);
      // The witness must reproduce the reported value with the same arithmetic.
      if (report.triple_witness) {
        const double again = kind == "convex" ? convexity_expression(f, *report.triple_witness)
                                              : affinity_expression(f, *report.triple_witness);
        if (std::max(0.0, again) != report.value) throw SolverError("witness failed to re-evaluate");
      }
    }
    if (noise > 0) report.seed = seed;
    std::cout << "defect[" << kind << "] = " << fmt_g17(report.value) << "  (test set "
              << report.test_set_size << ")\n";
    emit(out, report.to_json(), scope);
    scope.finish();
    return 0;
  }

  if (c_distance->parsed()) {
    scope.manifest.command = "distance";
    scope.add("body", body);
    scope.add("dim", std::to_string(dim));
    scope.add("k", std::to_string(k));
    scope.add("fn", fn);
    scope.add("class", cls);
    auto domain = make_domain(body, dim, k);
    const auto f = build_sample(domain, fn, noise, seed, exclude_origin);
    nlohmann::json j;
    j["class"] = cls;
    double d = 0;
    if (cls == "convex") {
      const auto result = distance_to_convex(f);
      d = result.distance;
      double check = 0;
      for (std::size_t i = 0; i < f.size(); ++i) {
        check = std::max(check, std::fabs(f[i] - result.nearest[i]));
      }
      if (std::fabs(check - d) > 1e-9 * std::max(1.0, d)) {
        throw SolverError("attained distance mismatch");
      }
      j["nearest"] = std::vector<double>(result.nearest.values().begin(), result.nearest.values().end());
    } else if (cls == "affine") {
      const auto fit = best_affine_fit(f);
      d = fit.distance;
      j["coeffs"] = fit.coeffs;
    } else if (cls == "jensen") {
      const auto fit = best_jensen_fit(f);
      d = fit.distance;
    } else {
      throw ParameterError("class must be convex|affine|jensen");
    }
    j["distance"] = d;
    std::cout << "distance[" << cls << "] = " << fmt_g17(d) << "\n";
    emit(out, j.dump(2), scope);
    scope.finish();
    return 0;
  }

  if (c_gallery->parsed()) {
    scope.manifest.command = "gallery";
    scope.add("family", family);
    scope.add("n", n_text);
    const auto ns = parse_int_list(n_text);
    const auto report = growth_report(growth_family_from_name(family), ns);
    std::cout << report.to_csv();
    emit(out, report.to_csv(), scope);
    emit(dat_out, report.to_dat(), scope);
    scope.finish();
    return 0;
  }

  if (c_lift->parsed()) {
    scope.manifest.command = "lift";
    scope.add("body", body);
    scope.add("dim", std::to_string(dim));
    scope.add("k", std::to_string(k));
    scope.add("fn", fn);
    scope.add("M", fmt_g17(M));
    const int j = t_power < 0 ? k : t_power;
    scope.add("t_power", std::to_string(j));
    auto domain = make_domain(body, dim, k);
    const auto f = build_sample(domain, fn, noise, seed, exclude_origin);
    const auto report = affine_recovery_experiment(f, M, j);
    std::cout << "epsilon = " << fmt_g17(report.epsilon) << "\nmeasured_d = " << fmt_g17(report.measured_d)
              << "\nbound = " << fmt_g17(report.theoretical_bound) << "\n";
    emit(out, report.to_json(), scope);
    scope.finish();
    if (report.measured_d > report.theoretical_bound + 1e-9) {
      std::cerr << "recovery exceeded the budgeted bound (is M valid for this norm?)\n";
      return 1;
    }
    return 0;
  }

  if (c_tal->parsed()) {
    scope.manifest.command = "talagrand";
    scope.add("eps", eps_text);
    scope.add("n", n_text);
    scope.add("p", p_text);
    const Rational eps = rational_from_string(eps_text);
    const Rational p = rational_from_string(p_text);
    const auto ns = parse_int_list(n_text);
    bool all_ok = true;
    for (int n : ns) {
      const CoveringSystem cs(eps, n);
      const auto small_union = verify_small_union(cs);
      const auto partition = verify_partition_sum(cs);
      all_ok = all_ok && small_union.passed && partition.passed;
      std::cout << "n=" << n << ": |Omega|=" << cs.omega_size() << " small-union "
                << (small_union.passed ? "ok" : "FAILED") << " (" << small_union.sets_checked
                << " sets), partition " << (partition.passed ? "ok" : "FAILED") << "\n";
    }
    const auto gap = envelope_gap_report(eps, ns, p);
    all_ok = all_ok && gap.passed;
    std::cout << gap.to_csv();
    emit(out, gap.to_csv(), scope);
    scope.finish();
    return all_ok ? 0 : 1;
  }

  if (c_pre->parsed()) {
    scope.manifest.command = "preimage";
    scope.add("dim", std::to_string(dim));
    scope.add("eps", fmt_g17(eps_d));
    scope.add("steps", std::to_string(steps));
    scope.add("p", p_text);
    std::vector<double> y;
    if (!target_text.empty()) {
      y = parse_double_list(target_text);
    } else {
      Rng rng(seed);
      y.resize(dim);
      for (auto& v : y) v = std::ldexp(static_cast<double>(rng.below(129)) - 64.0, -6);
      scope.add("target", "seeded");
    }
    const auto result = iterative_preimage(sign_vector_oracle(), y, eps_d, steps,
                                           rational_from_string(p_text));
    std::cout << result.to_csv();
    emit(out, result.to_csv(), scope);
    if (!dat_out.empty()) {
      std::ostringstream os;
      os << "# step residual envelope\n";
      double envelope = 1.0;
      for (std::size_t i = 0; i < result.residual_trace.size(); ++i) {
        envelope *= 0.5 + eps_d;
        os << (i + 1) << ' ' << fmt_g17(result.residual_trace[i]) << ' ' << fmt_g17(envelope) << '\n';
      }
      emit(dat_out, os.str(), scope);
    }
    scope.finish();
    // Verify the decay envelope and the p-sum bound before reporting success.
    double envelope = 1.0;
    const double factor = 0.5 + eps_d;
    for (double r : result.residual_trace) {
      envelope *= factor;
      if (r > envelope + 1e-12) {
        std::cerr << "residual escaped the geometric envelope\n";
        return 1;
      }
    }
    if (result.p_sum > result.p_sum_bound + 1e-9) {
      std::cerr << "coefficient p-sum exceeded the geometric bound\n";
      return 1;
    }
    return 0;
  }

  return 0;
}

}  // namespace
}  // namespace convlab

int main(int argc, char** argv) {
  try {
    return convlab::run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
