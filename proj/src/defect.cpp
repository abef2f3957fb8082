#include "convlab/defect.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "convlab/errors.hpp"

namespace convlab {

namespace {

void check_same_domain(const SampledFunction& f, const std::shared_ptr<const GridDomain>& domain) {
  if (!domain) throw ParameterError("test set has no domain");
  if (f.domain_ptr() == domain) return;
  const GridDomain& a = f.domain();
  const GridDomain& b = *domain;
  if (a.body_kind() != b.body_kind() || a.dim() != b.dim() || a.denom_power() != b.denom_power() ||
      a.size() != b.size()) {
    throw DomainMismatchError("test set was enumerated on a different domain");
  }
}

double checked_eval(const SparseEvaluator& f, const SparseVector& x, const char* what) {
  const double v = f(x);
  if (!std::isfinite(v)) throw EvaluationError(std::string("non-finite value of ") + what);
  return v;
}

nlohmann::json sparse_to_json(const SparseVector& v) {
  auto arr = nlohmann::json::array();
  for (const auto& [idx, val] : v.entries()) arr.push_back({idx, val});
  return arr;
}

}  // namespace

std::string defect_kind_name(DefectKind kind) {
  switch (kind) {
    case DefectKind::Convex: return "convex";
    case DefectKind::Affine: return "affine";
    case DefectKind::Jensen: return "jensen";
    case DefectKind::QuasiAdditive: return "quasi_additive";
  }
  throw ParameterError("unknown defect kind");
}

double convexity_expression(const SampledFunction& f, const ConvexTriple& triple) {
  const double t = triple.t();
  return f[triple.combo_id] - t * f[triple.x_id] - (1.0 - t) * f[triple.y_id];
}

double affinity_expression(const SampledFunction& f, const ConvexTriple& triple) {
  return std::fabs(convexity_expression(f, triple));
}

double jensen_expression(const SampledFunction& f, const MidpointPair& pair) {
  return std::fabs(f[pair.mid_id] - 0.5 * (f[pair.x_id] + f[pair.y_id]));
}

namespace {

DefectReport grid_defect(const SampledFunction& f, const TripleSet& triples, DefectKind kind) {
  check_same_domain(f, triples.domain);
  DefectReport report;
  report.kind = kind;
  report.test_set_size = triples.triples.size();
  double sup = -std::numeric_limits<double>::infinity();
  for (const auto& triple : triples.triples) {
    const double e =
        kind == DefectKind::Convex ? convexity_expression(f, triple) : affinity_expression(f, triple);
    if (e > sup) {  // strict: ties keep the first witness in enumeration order
      sup = e;
      report.triple_witness = triple;
    }
  }
  report.value = report.triple_witness ? std::max(0.0, sup) : 0.0;
  return report;
}

}  // namespace

DefectReport convexity_defect(const SampledFunction& f, const TripleSet& triples) {
  return grid_defect(f, triples, DefectKind::Convex);
}

DefectReport affinity_defect(const SampledFunction& f, const TripleSet& triples) {
  return grid_defect(f, triples, DefectKind::Affine);
}

DefectReport jensen_defect(const SampledFunction& f, const MidpointSet& pairs) {
  check_same_domain(f, pairs.domain);
  DefectReport report;
  report.kind = DefectKind::Jensen;
  report.test_set_size = pairs.pairs.size();
  double sup = -std::numeric_limits<double>::infinity();
  for (const auto& pair : pairs.pairs) {
    const double e = jensen_expression(f, pair);
    if (e > sup) {
      sup = e;
      report.pair_witness = pair;
    }
  }
  report.value = report.pair_witness ? std::max(0.0, sup) : 0.0;
  return report;
}

DefectReport convexity_defect_sampled(const SparseEvaluator& f, std::span<const SparseTriple> sample,
                                      std::optional<std::uint64_t> seed) {
  DefectReport report;
  report.kind = DefectKind::Convex;
  report.test_set_size = sample.size();
  report.seed = seed;
  double sup = -std::numeric_limits<double>::infinity();
  for (const auto& triple : sample) {
    const SparseVector combo = SparseVector::combine(triple.x, triple.y, triple.t);
    const double e = checked_eval(f, combo, "combination") - triple.t * checked_eval(f, triple.x, "x") -
                     (1.0 - triple.t) * checked_eval(f, triple.y, "y");
    if (e > sup) {
      sup = e;
      report.sparse_triple_witness = triple;
    }
  }
  report.value = report.sparse_triple_witness ? std::max(0.0, sup) : 0.0;
  return report;
}

DefectReport quasi_additivity_constant(const SparseEvaluator& f,
                                       std::span<const std::pair<SparseVector, SparseVector>> pairs,
                                       NormKind norm, std::optional<std::uint64_t> seed) {
  DefectReport report;
  report.kind = DefectKind::QuasiAdditive;
  report.test_set_size = pairs.size();
  report.seed = seed;
  double sup = -std::numeric_limits<double>::infinity();
  for (const auto& [x, y] : pairs) {
    const double denom = x.norm(norm) + y.norm(norm);
    if (denom == 0) continue;
    const double e = std::fabs(checked_eval(f, x + y, "x+y") - checked_eval(f, x, "x") -
                               checked_eval(f, y, "y")) /
                     denom;
    if (e > sup) {
      sup = e;
      report.sparse_pair_witness = {x, y};
    }
  }
  report.value = report.sparse_pair_witness ? std::max(0.0, sup) : 0.0;
  return report;
}

ChainReport chain_inequality_check(const SparseEvaluator& f, std::span<const SparseVector> x_list,
                                   double quasi_constant, const SparseEvaluator& gauge) {
  ChainReport report;
  if (x_list.empty()) return report;
  SparseVector total;
  double f_sum = 0;
  double weighted_gauge = 0;
  for (std::size_t i = 0; i < x_list.size(); ++i) {
    total = total + x_list[i];
    f_sum += checked_eval(f, x_list[i], "summand");
    weighted_gauge += static_cast<double>(i + 1) * checked_eval(gauge, x_list[i], "gauge");
  }
  report.lhs = std::fabs(checked_eval(f, total, "partial sum") - f_sum);
  report.rhs = quasi_constant * weighted_gauge;
  report.holds = report.lhs <= report.rhs;
  return report;
}

SparseVector sample_sparse_vector(Rng& rng, const SparseSampleParams& params) {
  const std::int64_t den = std::int64_t{1} << params.value_denom_power;
  for (;;) {
    const int support = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(params.max_support)));
    std::vector<SparseVector::Entry> entries;
    entries.reserve(support);
    for (int s = 0; s < support; ++s) {
      const std::int64_t idx = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(params.max_index)));
      const double span = params.value_span;
      double v;
      if (params.nonnegative) {
        v = static_cast<double>(1 + rng.below(static_cast<std::uint64_t>(span * den))) / den;
      } else {
        const auto steps = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(2 * span * den + 1)));
        v = static_cast<double>(steps - static_cast<std::int64_t>(span * den)) / den;
      }
      entries.emplace_back(idx, v);
    }
    SparseVector out = SparseVector::from_entries(std::move(entries));
    if (params.allow_zero || !out.empty()) return out;
  }
}

std::vector<std::pair<SparseVector, SparseVector>> sample_sparse_pairs(std::uint64_t seed, std::size_t count,
                                                                       const SparseSampleParams& params) {
  Rng rng(seed);
  std::vector<std::pair<SparseVector, SparseVector>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto x = sample_sparse_vector(rng, params);
    auto y = sample_sparse_vector(rng, params);
    out.emplace_back(std::move(x), std::move(y));
  }
  return out;
}

std::vector<SparseTriple> sample_sparse_triples(std::uint64_t seed, std::size_t count,
                                                const SparseSampleParams& params) {
  Rng rng(seed);
  std::vector<SparseTriple> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    SparseTriple triple;
    triple.x = sample_sparse_vector(rng, params);
    triple.y = sample_sparse_vector(rng, params);
    triple.t = rng.next_double();
    out.push_back(std::move(triple));
  }
  return out;
}

std::string DefectReport::to_json() const {
  nlohmann::json j;
  j["kind"] = defect_kind_name(kind);
  j["value"] = value;
  j["test_set_size"] = test_set_size;
  if (seed) j["seed"] = *seed;
  nlohmann::json w;
  if (triple_witness) {
    w["x_id"] = triple_witness->x_id;
    w["y_id"] = triple_witness->y_id;
    w["t_num"] = triple_witness->t_num;
    w["t_denom_power"] = triple_witness->t_denom_power;
    w["combo_id"] = triple_witness->combo_id;
  } else if (pair_witness) {
    w["x_id"] = pair_witness->x_id;
    w["y_id"] = pair_witness->y_id;
    w["mid_id"] = pair_witness->mid_id;
  } else if (sparse_triple_witness) {
    w["x"] = sparse_to_json(sparse_triple_witness->x);
    w["y"] = sparse_to_json(sparse_triple_witness->y);
    w["t"] = sparse_triple_witness->t;
  } else if (sparse_pair_witness) {
    w["x"] = sparse_to_json(sparse_pair_witness->first);
    w["y"] = sparse_to_json(sparse_pair_witness->second);
  }
  j["witness"] = w;
  return j.dump();
}

std::string ChainReport::to_json() const {
  nlohmann::json j;
  j["lhs"] = lhs;
  j["rhs"] = rhs;
  j["holds"] = holds;
  return j.dump();
}

}  // namespace convlab
