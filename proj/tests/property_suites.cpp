#include "property_suites.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "convlab/convex_fit.hpp"
#include "convlab/covering.hpp"
#include "convlab/defect.hpp"
#include "convlab/gallery.hpp"
#include "convlab/grid_domain.hpp"
#include "convlab/lift.hpp"
#include "convlab/lp.hpp"
#include "convlab/rng.hpp"

namespace convlab::props {

namespace {

class Harness {
 public:
  Harness(std::vector<PropertyResult>& sink, std::string module, std::string name)
      : sink_(sink), result_{std::move(module), std::move(name), 0, 0, {}} {}
  ~Harness() { sink_.push_back(std::move(result_)); }

  void check(bool ok, const std::string& detail) {
    ++result_.cases;
    if (!ok && result_.failures++ == 0) result_.first_failure = detail;
  }

  /// A single sup-style comparison that settles `count` pointwise checks at
  /// once (the sup is the max over exactly those cases).
  void check_bulk(bool ok, std::size_t count, const std::string& detail) {
    result_.cases += count;
    if (!ok && result_.failures++ == 0) result_.first_failure = detail;
  }

 private:
  std::vector<PropertyResult>& sink_;
  PropertyResult result_;
};

std::shared_ptr<const GridDomain> shared(GridDomain&& d) {
  return std::make_shared<const GridDomain>(std::move(d));
}

std::shared_ptr<const GridDomain> random_small_domain(Rng& rng) {
  switch (rng.below(5)) {
    case 0: return shared(make_simplex_grid(2 + static_cast<int>(rng.below(2)), 1 + static_cast<int>(rng.below(2))));
    case 1: return shared(make_cube_grid(1, 1 + static_cast<int>(rng.below(2))));
    case 2: return shared(make_cube_grid(2, 1));
    case 3: return shared(make_positive_section_grid(2, 1));
    default: return shared(make_ball_grid(2, 1, BodyKind::BallEuclid));
  }
}

SampledFunction random_sample(std::shared_ptr<const GridDomain> domain, Rng& rng, double span = 1.0) {
  std::vector<double> v(domain->size());
  for (auto& x : v) x = rng.uniform(-span, span);
  return SampledFunction(std::move(domain), std::move(v));
}

SampledFunction plus_affine(const SampledFunction& f, std::span<const double> a, double b) {
  std::vector<double> v(f.values().begin(), f.values().end());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto x = f.domain().point_values(i);
    double acc = b;
    for (std::size_t j = 0; j < x.size(); ++j) acc += a[j] * x[j];
    v[i] += acc;
  }
  return SampledFunction(f.domain_ptr(), std::move(v));
}

std::string fmt_case(std::size_t i) { return "case " + std::to_string(i); }

// ---------------------------------------------------------------- grids ----

void grid_properties(std::vector<PropertyResult>& out, std::size_t budget) {
  {
    Harness h(out, "grid_domains", "exactness: combinations re-verify in integer arithmetic");
    Rng rng(101);
    std::size_t done = 0;
    while (done < budget) {
      const auto domain = random_small_domain(rng);
      const int j = 1 + static_cast<int>(rng.below(2));
      const auto set = enumerate_convex_triples(domain, j);
      const std::int64_t tden = std::int64_t{1} << j;
      for (const auto& t : set.triples) {
        if (done >= budget) break;
        bool ok = true;
        for (int c = 0; c < domain->dim(); ++c) {
          ok = ok && t.t_num * domain->point(t.x_id)[c] + (tden - t.t_num) * domain->point(t.y_id)[c] ==
                         tden * domain->point(t.combo_id)[c];
        }
        h.check(ok, fmt_case(done));
        ++done;
      }
    }
  }
  {
    Harness h(out, "grid_domains", "symmetry: (x,y,t) produced iff (y,x,1-t) produced");
    Rng rng(102);
    std::size_t done = 0;
    while (done < budget) {
      const auto domain = random_small_domain(rng);
      const int j = 1 + static_cast<int>(rng.below(2));
      const auto set = enumerate_convex_triples(domain, j);
      std::set<std::tuple<std::size_t, std::size_t, std::int64_t>> keys;
      for (const auto& t : set.triples) keys.insert({t.x_id, t.y_id, t.t_num});
      const std::int64_t tden = std::int64_t{1} << j;
      for (const auto& t : set.triples) {
        if (done >= budget) break;
        h.check(keys.count({t.y_id, t.x_id, tden - t.t_num}) == 1, fmt_case(done));
        ++done;
      }
    }
  }
  {
    Harness h(out, "grid_domains", "determinism: repeated enumeration is identical");
    Rng rng(103);
    std::size_t done = 0;
    while (done < budget) {
      const auto domain = random_small_domain(rng);
      const int j = 1 + static_cast<int>(rng.below(2));
      const auto a = enumerate_convex_triples(domain, j);
      const auto b = enumerate_convex_triples(domain, j);
      bool same = a.triples.size() == b.triples.size();
      for (std::size_t i = 0; same && i < a.triples.size(); ++i) {
        same = a.triples[i].x_id == b.triples[i].x_id && a.triples[i].y_id == b.triples[i].y_id &&
               a.triples[i].t_num == b.triples[i].t_num && a.triples[i].combo_id == b.triples[i].combo_id;
      }
      const std::size_t chunk = std::max<std::size_t>(1, a.triples.size());
      for (std::size_t i = 0; i < chunk && done < budget; ++i, ++done) h.check(same, fmt_case(done));
    }
  }
  {
    Harness h(out, "grid_domains", "counting: point counts match the closed forms");
    Rng rng(104);
    for (std::size_t i = 0; i < budget; ++i) {
      const int n = 1 + static_cast<int>(rng.below(4));
      const int k = static_cast<int>(rng.below(4));
      const std::int64_t den = std::int64_t{1} << k;
      double expect = 1;
      for (int q = 1; q <= n - 1; ++q) expect = expect * static_cast<double>(den + q) / q;
      const auto simplex = make_simplex_grid(n, k);
      bool ok = simplex.size() == static_cast<std::size_t>(expect + 0.5);
      const auto section = make_positive_section_grid(n, k);
      ok = ok && section.size() == static_cast<std::size_t>(std::pow(static_cast<double>(den + 1), n) + 0.5);
      h.check(ok, fmt_case(i));
    }
  }
}

// --------------------------------------------------------------- defects ----

void defect_properties(std::vector<PropertyResult>& out, std::size_t budget) {
  {
    Harness h(out, "defect_meter", "affine invariance of all three defects");
    Rng rng(201);
    for (std::size_t i = 0; i < budget; ++i) {
      const auto domain = random_small_domain(rng);
      const auto f = random_sample(domain, rng);
      std::vector<double> a(domain->dim());
      for (auto& v : a) v = rng.uniform(-2, 2);
      const auto g = plus_affine(f, a, rng.uniform(-2, 2));
      const auto triples = enumerate_convex_triples(domain, 1);
      const auto pairs = enumerate_midpoint_pairs(domain);
      auto close = [](double x, double y) { return std::fabs(x - y) <= 1e-12 * std::max(1.0, std::fabs(x)); };
      const bool ok = close(convexity_defect(f, triples).value, convexity_defect(g, triples).value) &&
                      close(affinity_defect(f, triples).value, affinity_defect(g, triples).value) &&
                      close(jensen_defect(f, pairs).value, jensen_defect(g, pairs).value);
      h.check(ok, fmt_case(i));
    }
  }
  {
    Harness h(out, "defect_meter", "positive homogeneity: defect(t f) = t defect(f)");
    Rng rng(202);
    for (std::size_t i = 0; i < budget; ++i) {
      const auto domain = random_small_domain(rng);
      const auto f = random_sample(domain, rng);
      const double t = rng.uniform(0, 3);
      std::vector<double> tv(f.values().begin(), f.values().end());
      for (auto& v : tv) v *= t;
      const SampledFunction tf(domain, tv);
      const auto triples = enumerate_convex_triples(domain, 1);
      const double lhs = convexity_defect(tf, triples).value;
      const double rhs = t * convexity_defect(f, triples).value;
      h.check(std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, rhs), fmt_case(i));
    }
  }
  {
    Harness h(out, "defect_meter", "monotone in the test set");
    Rng rng(203);
    for (std::size_t i = 0; i < budget; ++i) {
      const auto domain = random_small_domain(rng);
      const auto f = random_sample(domain, rng);
      auto full = enumerate_convex_triples(domain, 1);
      TripleSet partial;
      partial.domain = full.domain;
      for (const auto& t : full.triples) {
        if (rng.below(2)) partial.triples.push_back(t);
      }
      h.check(convexity_defect(f, partial).value <= convexity_defect(f, full).value + 1e-15,
              fmt_case(i));
    }
  }
  {
    Harness h(out, "defect_meter", "jensen defect below affinity defect");
    Rng rng(204);
    for (std::size_t i = 0; i < budget; ++i) {
      const auto domain = random_small_domain(rng);
      const auto f = random_sample(domain, rng);
      const double jd = jensen_defect(f, enumerate_midpoint_pairs(domain)).value;
      const double ad = affinity_defect(f, enumerate_convex_triples(domain, 1)).value;
      h.check(jd <= ad + 1e-15, fmt_case(i));
    }
  }
  {
    Harness h(out, "defect_meter", "convex minorants have zero convexity defect");
    Rng rng(205);
    const auto domain = shared(make_cube_grid(1, 2));
    const auto triples = enumerate_convex_triples(domain, 2);
    for (std::size_t i = 0; i < budget; ++i) {
      const auto f = random_sample(domain, rng);
      const auto co = convex_minorant(f);
      h.check(convexity_defect(co, triples).value <= 1e-7, fmt_case(i));
    }
  }
}

// --------------------------------------------------------------- lp_core ----

void lp_properties(std::vector<PropertyResult>& out, std::size_t budget) {
  {
    Harness h(out, "lp_core", "minorant below f and idempotent");
    Rng rng(301);
    const auto domain = shared(make_positive_section_grid(2, 1));
    for (std::size_t i = 0; i < budget; ++i) {
      const auto f = random_sample(domain, rng);
      const auto co = convex_minorant(f);
      const auto coco = convex_minorant(co);
      bool ok = true;
      for (std::size_t p = 0; p < f.size(); ++p) {
        ok = ok && co[p] <= f[p] + 1e-9 && std::fabs(coco[p] - co[p]) <= 1e-7;
      }
      h.check(ok, fmt_case(i));
    }
  }
  {
    Harness h(out, "lp_core", "minorant is monotone");
    Rng rng(302);
    const auto domain = shared(make_cube_grid(1, 2));
    for (std::size_t i = 0; i < budget; ++i) {
      const auto f = random_sample(domain, rng);
      std::vector<double> hv(f.values().begin(), f.values().end());
      for (auto& v : hv) v += rng.uniform(0, 1);
      const auto cof = convex_minorant(f);
      const auto coh = convex_minorant(SampledFunction(domain, hv));
      bool ok = true;
      for (std::size_t p = 0; p < f.size(); ++p) ok = ok && cof[p] <= coh[p] + 1e-8;
      h.check(ok, fmt_case(i));
    }
  }
  {
    Harness h(out, "lp_core", "distance identity: g convex and exactly d away");
    Rng rng(303);
    const auto domain = shared(make_cube_grid(1, 2));
    const auto triples = enumerate_convex_triples(domain, 2);
    for (std::size_t i = 0; i < budget; ++i) {
      const auto f = random_sample(domain, rng);
      const auto result = distance_to_convex(f);
      double dist = 0;
      for (std::size_t p = 0; p < f.size(); ++p) {
        dist = std::max(dist, std::fabs(f[p] - result.nearest[p]));
      }
      const bool ok = convexity_defect(result.nearest, triples).value <= 1e-7 &&
                      std::fabs(dist - result.distance) <= 1e-9;
      h.check(ok, fmt_case(i));
    }
  }
  {
    Harness h(out, "lp_core", "affine fit distance invariant under affine shifts");
    Rng rng(304);
    const auto domain = shared(make_cube_grid(2, 1));
    for (std::size_t i = 0; i < budget; ++i) {
      const auto f = random_sample(domain, rng);
      std::vector<double> a(domain->dim());
      for (auto& v : a) v = rng.uniform(-2, 2);
      const auto g = plus_affine(f, a, rng.uniform(-2, 2));
      const double df = best_affine_fit(f).distance;
      const double dg = best_affine_fit(g).distance;
      h.check(std::fabs(df - dg) <= 1e-7 * std::max(1.0, df), fmt_case(i));
    }
  }
  {
    Harness h(out, "lp_core", "solver determinism: identical input, identical coordinates");
    Rng rng(305);
    for (std::size_t i = 0; i < budget; ++i) {
      LinearProgram lp;
      lp.sense = rng.below(2) ? Sense::Maximize : Sense::Minimize;
      const std::size_t dim = 2 + rng.below(2);
      lp.objective.resize(dim);
      for (auto& c : lp.objective) c = rng.uniform(-1, 1);
      lp.bounds.resize(dim);
      for (auto& b : lp.bounds) {
        b.lower = -2.0;
        b.upper = 2.0;
      }
      for (int r = 0; r < 3; ++r) {
        std::vector<double> coeffs(dim);
        for (auto& v : coeffs) v = rng.uniform(-1, 1);
        lp.constraints.push_back({std::move(coeffs), Relation::LessEq, rng.uniform(0, 2)});
      }
      const auto s1 = solve_lp(lp);
      const auto s2 = solve_lp(lp);
      bool ok = s1.status == s2.status && s1.iterations == s2.iterations;
      if (ok && s1.status == LpStatus::Optimal) {
        for (std::size_t p = 0; p < dim; ++p) ok = ok && s1.primal[p] == s2.primal[p];
      }
      h.check(ok, fmt_case(i));
    }
  }
}

// ---------------------------------------------------------------- gallery ----

void gallery_properties(std::vector<PropertyResult>& out, std::size_t budget) {
  {
    Harness h(out, "counterexample_gallery",
              "ribe/kalton homogeneity: bitwise for powers of two, 1e-12 for dyadics");
    Rng rng(401);
    SparseSampleParams params;
    for (std::size_t i = 0; i < budget; ++i) {
      const auto x = sample_sparse_vector(rng, params);
      const double r = ribe(x), k = kalton_map(x);
      bool ok = true;
      for (int j : {-2, -1, 1, 3}) {
        const double t = std::ldexp(1.0, j);
        ok = ok && ribe(x.scaled(t)) == t * r && kalton_map(x.scaled(t)) == t * k;
        ok = ok && ribe(x.scaled(-t)) == -t * r && kalton_map(x.scaled(-t)) == -t * k;
      }
      for (double t : {0.75, 1.25}) {
        ok = ok && std::fabs(ribe(x.scaled(t)) - t * r) <= 1e-12 * std::max(1.0, std::fabs(t * r));
        ok = ok && std::fabs(kalton_map(x.scaled(t)) - t * k) <= 1e-12 * std::max(1.0, std::fabs(t * k));
      }
      h.check(ok, fmt_case(i));
    }
  }
  {
    Harness h(out, "counterexample_gallery", "ribe quasi-additivity below 2 in l1");
    const auto pairs = sample_sparse_pairs(402, budget, {});
    Harness* hp = &h;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto& [x, y] = pairs[i];
      const double denom = x.norm(NormKind::L1) + y.norm(NormKind::L1);
      if (denom == 0) {
        hp->check(true, fmt_case(i));
        continue;
      }
      const double q = std::fabs(ribe(x + y) - ribe(x) - ribe(y)) / denom;
      hp->check(q <= 2.0 + 1e-9, fmt_case(i));
    }
  }
  {
    Harness h(out, "counterexample_gallery", "entropy is 1-convex on dyadic simplex grids");
    for (auto [n, k] : {std::pair{2, 2}, {3, 2}, {4, 2}, {3, 3}}) {
      const auto domain = shared(make_simplex_grid(n, k));
      const auto f = sample_function(domain, [](std::span<const double> x) { return entropy_simplex(x); });
      const auto set = enumerate_convex_triples(domain, k);
      const auto report = convexity_defect(f, set);
      h.check_bulk(report.value <= 1.0 + 1e-9, report.test_set_size,
                   "simplex(" + std::to_string(n) + "," + std::to_string(k) + ")");
    }
  }
  {
    Harness h(out, "counterexample_gallery", "-log2 norm is 1-convex on the positive cone");
    SparseSampleParams nn;
    nn.nonnegative = true;
    const auto sample = sample_sparse_triples(404, budget, nn);
    for (const NormKind norm : {NormKind::Sup, NormKind::L1, NormKind::L2}) {
      const auto report = convexity_defect_sampled(
          [norm](const SparseVector& x) { return neg_log_norm(x, norm); }, sample, 404);
      h.check_bulk(report.value <= 1.0 + 1e-9, report.test_set_size, norm_kind_name(norm));
    }
  }
  {
    Harness h(out, "counterexample_gallery", "omega is 2-convex on the positive cone");
    SparseSampleParams nn;
    nn.nonnegative = true;
    const auto sample = sample_sparse_triples(405, budget, nn);
    const auto report = convexity_defect_sampled(
        [](const SparseVector& x) { return static_cast<double>(cholewa_kominek_omega(x)); }, sample, 405);
    h.check_bulk(report.value <= 2.0 + 1e-9, report.test_set_size, "sampled defect");
  }
  {
    Harness h(out, "counterexample_gallery", "f_star (both variants) is 1-convex on section grids");
    const auto domain = shared(make_positive_section_grid(3, 2));
    const auto set = enumerate_convex_triples(domain, 2);
    for (const auto& cfg : {FStarConfig::nested(), FStarConfig::blocks({2, 1}), FStarConfig::blocks({3})}) {
      const auto f = sample_function(domain, [&](std::span<const double> x) { return f_star(x, cfg); });
      h.check_bulk(convexity_defect(f, set).value <= 1.0 + 1e-9, set.triples.size(),
                   cfg.variant == FStarConfig::Variant::Nested ? "nested" : "blocks");
    }
  }
  {
    Harness h(out, "counterexample_gallery", "f_star blocks vanishes at every q_i");
    for (int m = 1; m <= 45; ++m) {
      const auto cfg = FStarConfig::blocks({m});
      for (int i = 0; i < m; ++i) {
        std::vector<double> q(m, 1.0);
        q[i] = 0.0;
        h.check(f_star(q, cfg) == 0.0, "m=" + std::to_string(m) + " i=" + std::to_string(i));
      }
    }
  }
}

// ----------------------------------------------------------------- lifts ----

void lift_properties(std::vector<PropertyResult>& out, std::size_t budget) {
  Rng rng(501);
  const auto domain = shared(make_cube_grid(2, 2));
  const auto triples = enumerate_convex_triples(domain, 2);

  std::vector<RadialLift> lifts;
  std::vector<double> epsilons;
  std::vector<SampledFunction> samples;
  const std::size_t lift_count = std::max<std::size_t>(1, budget / 20);
  for (std::size_t i = 0; i < lift_count; ++i) {
    std::vector<double> v(domain->size());
    const double a0 = rng.uniform(-2, 2), a1 = rng.uniform(-2, 2), amp = rng.uniform(0.02, 0.2);
    for (std::size_t p = 0; p < v.size(); ++p) {
      const auto x = domain->point_values(p);
      v[p] = a0 * x[0] + a1 * x[1] + rng.uniform(-amp, amp);
    }
    samples.emplace_back(domain, v);
    epsilons.push_back(affinity_defect(samples.back(), triples).value);
    lifts.push_back(radial_affine_lift(lines_from_grid(samples.back(), NormKind::Sup), NormKind::Sup));
  }

  {
    Harness h(out, "homogenization", "lift homogeneity under dyadic scaling");
    std::size_t done = 0;
    while (done < budget) {
      const auto& lift = lifts[done % lifts.size()];
      const std::size_t pid = rng.below(domain->size());
      const auto p = domain->point(pid);
      const double v = lift.evaluate(p, 2).value;
      std::vector<std::int64_t> scaled(p.begin(), p.end());
      for (auto& c : scaled) c *= 4;
      const bool ok = lift.evaluate(scaled, 2).value == 4.0 * v && lift.evaluate(p, 1).value == 2.0 * v;
      h.check(ok, fmt_case(done));
      ++done;
    }
  }
  {
    Harness h(out, "homogenization", "per-line drop error within 2 eps on eps-affine input");
    for (std::size_t i = 0; i < lifts.size(); ++i) {
      for (const auto& line : lifts[i].lines()) {
        h.check(line.drop_error <= 2 * epsilons[i] + 1e-9, fmt_case(i));
      }
    }
  }
  {
    Harness h(out, "homogenization", "lift stays within 2 eps of f on rays (4 eps for degree 2)");
    for (std::size_t i = 0; i < lifts.size(); ++i) {
      // Per-line drop error is exactly sup over that ray's samples of
      // |f - f(0) - f*|.
      for (const auto& line : lifts[i].lines()) {
        h.check(line.drop_error <= 2 * epsilons[i] + 1e-9, fmt_case(i));
      }
    }
    const auto jf = samples[0];
    const auto jl = radial_jensen_lift(lines_from_grid(jf, NormKind::Sup), NormKind::Sup);
    double jeps = 0;
    for (const auto& pr : enumerate_midpoint_pairs(domain).pairs) {
      jeps = std::max(jeps, std::fabs(jf[pr.mid_id] - 0.5 * (jf[pr.x_id] + jf[pr.y_id])));
    }
    h.check(jl.max_drop_error() <= 4 * jeps + 1e-9, "degree 2");
  }
  {
    Harness h(out, "homogenization", "doubling identity exact on sampled rays");
    const auto& lift = lifts[0];
    const auto pairs = ray_closed_pairs(*domain, lift);
    std::size_t done = 0;
    for (const auto& [x, y] : pairs) {
      if (done >= budget) break;
      std::vector<std::int64_t> sum(x.numerators.size());
      for (std::size_t c = 0; c < sum.size(); ++c) sum[c] = x.numerators[c] + y.numerators[c];
      const double whole = lift.evaluate(sum, 2).value;
      const double half = lift.evaluate(sum, 3).value;
      const double fx_fy = lift.evaluate(x.numerators, 2).value + lift.evaluate(y.numerators, 2).value;
      const bool ok = whole == 2.0 * half && std::fabs(whole - fx_fy) == 2.0 * std::fabs(half - 0.5 * fx_fy);
      h.check(ok, fmt_case(done));
      ++done;
    }
  }
}

// -------------------------------------------------------------- envelopes ----

void covering_properties(std::vector<PropertyResult>& out, std::size_t budget) {
  Rng rng(601);
  const CoveringSystem small(Rational(1), 2);
  const CoveringSystem tiny(Rational(1, 2), 2);
  auto random_f = [&](const CoveringSystem& cs) {
    std::vector<Rational> f(cs.omega_size());
    for (auto& v : f) v = Rational(static_cast<std::int64_t>(rng.below(33)), 8);
    return f;
  };

  {
    Harness h(out, "envelope_lab",
              "quasi-norm: homogeneity, monotonicity, p-triangle, sup lower bound");
    const Rational p(1, 2);
    for (std::size_t i = 0; i < budget; ++i) {
      const CoveringSystem& cs = i % 2 ? small : tiny;
      const auto f = random_f(cs);
      const auto g = random_f(cs);
      const auto cf = quasi_norm(cs, f, p);

      bool ok = true;
      // homogeneity: certificates scale exactly
      const Rational lambda(3, 4);
      auto lf = f;
      for (auto& v : lf) v *= lambda;
      const auto cl = quasi_norm(cs, lf, p);
      for (std::size_t c = 0; c < cf.c.size(); ++c) ok = ok && cl.c[c] == lambda * cf.c[c];
      // monotonicity in |f|
      auto big = f;
      for (auto& v : big) v += Rational(1, 8);
      ok = ok && quasi_norm(cs, big, p).objective >= cf.objective - 1e-9;
      // p-triangle
      auto sum = f;
      for (std::size_t w = 0; w < sum.size(); ++w) sum[w] += g[w];
      const double lhs = std::pow(quasi_norm(cs, sum, p).objective, 0.5);
      const double rhs = std::pow(cf.objective, 0.5) + std::pow(quasi_norm(cs, g, p).objective, 0.5);
      ok = ok && lhs <= rhs + 1e-9;
      // sup norm below the quasi-norm
      Rational sup = 0;
      for (const auto& v : f) sup = std::max(sup, Rational(abs(v)));
      ok = ok && to_double(sup) <= cf.objective + 1e-9;
      h.check(ok, fmt_case(i));
    }
  }
  {
    Harness h(out, "envelope_lab", "envelope norm: triangle, equality at p=1, sandwich");
    for (std::size_t i = 0; i < budget; ++i) {
      const CoveringSystem& cs = i % 2 ? small : tiny;
      const auto f = random_f(cs);
      const auto g = random_f(cs);
      auto sum = f;
      for (std::size_t w = 0; w < sum.size(); ++w) sum[w] += g[w];
      bool ok = envelope_norm(cs, sum) <= envelope_norm(cs, f) + envelope_norm(cs, g);
      const auto qn1 = quasi_norm(cs, f, Rational(1));
      Rational c_sum = 0;
      for (const auto& v : qn1.c) c_sum += v;
      const Rational env = envelope_norm(cs, f);
      ok = ok && c_sum == env;
      Rational sup = 0;
      for (const auto& v : f) sup = std::max(sup, Rational(abs(v)));
      ok = ok && env >= sup && env <= (Rational(1) + cs.eps()) * sup;
      ok = ok && to_double(env) <= quasi_norm(cs, f, Rational(1, 2)).objective + 1e-9;
      h.check(ok, fmt_case(i));
    }
  }
  {
    Harness h(out, "envelope_lab", "vertex enumeration equals support-pattern brute force");
    for (std::size_t i = 0; i < budget; ++i) {
      const CoveringSystem& cs = i % 2 ? small : tiny;
      const auto f = random_f(cs);
      const auto dd = covering_polyhedron_vertices(cs, f);
      const auto bf = brute_force_quasi_norm(cs, f, Rational(1, 2));
      const std::set<std::vector<Rational>> a(dd.begin(), dd.end());
      const std::set<std::vector<Rational>> b(bf.vertices.begin(), bf.vertices.end());
      h.check(a == b, fmt_case(i));
    }
  }
  {
    Harness h(out, "envelope_lab", "preimage residuals: monotone under the geometric envelope");
    const auto oracle = sign_vector_oracle();
    for (std::size_t i = 0; i < budget; ++i) {
      std::vector<double> y(3);
      for (auto& v : y) v = std::ldexp(static_cast<double>(rng.below(65)) - 32.0, -5);
      const auto result = iterative_preimage(oracle, y, 0.0, 12, Rational(1, 2));
      bool ok = true;
      double envelope = 1.0, prev = 1.0;
      for (double r : result.residual_trace) {
        envelope *= 0.5;
        ok = ok && r <= envelope + 1e-15 && r <= prev + 1e-15;
        prev = r;
      }
      h.check(ok, fmt_case(i));
    }
  }
}

}  // namespace

std::vector<PropertyResult> run_all_property_suites(std::size_t budget) {
  std::vector<PropertyResult> out;
  grid_properties(out, budget);
  defect_properties(out, budget);
  lp_properties(out, budget);
  gallery_properties(out, budget);
  lift_properties(out, budget);
  covering_properties(out, budget);
  return out;
}

}  // namespace convlab::props
