#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "convlab/grid_domain.hpp"
#include "convlab/rng.hpp"
#include "convlab/sparse_vector.hpp"

namespace convlab {

enum class DefectKind { Convex, Affine, Jensen, QuasiAdditive };

std::string defect_kind_name(DefectKind kind);

/// A sampled convex combination of finitely supported vectors.
struct SparseTriple {
  SparseVector x;
  SparseVector y;
  double t = 0.5;
};

/// Measured defect plus the witness achieving the supremum. Exactly one of
/// the witness slots is filled, matching the kind of test set used.
struct DefectReport {
  DefectKind kind = DefectKind::Convex;
  double value = 0;
  std::size_t test_set_size = 0;
  std::optional<std::uint64_t> seed;

  std::optional<ConvexTriple> triple_witness;
  std::optional<MidpointPair> pair_witness;
  std::optional<SparseTriple> sparse_triple_witness;
  std::optional<std::pair<SparseVector, SparseVector>> sparse_pair_witness;

  std::string to_json() const;
};

// Defect expressions, shared between the sup scan and witness re-evaluation
// so the two are computed with identical arithmetic.
double convexity_expression(const SampledFunction& f, const ConvexTriple& triple);
double affinity_expression(const SampledFunction& f, const ConvexTriple& triple);
double jensen_expression(const SampledFunction& f, const MidpointPair& pair);

/// max(0, sup of f(combo) - t f(x) - (1-t) f(y)) over the triples.
DefectReport convexity_defect(const SampledFunction& f, const TripleSet& triples);

/// Two-sided version: sup |f(combo) - t f(x) - (1-t) f(y)|.
DefectReport affinity_defect(const SampledFunction& f, const TripleSet& triples);

/// sup |f(mid) - (f(x)+f(y))/2| over midpoint pairs.
DefectReport jensen_defect(const SampledFunction& f, const MidpointSet& pairs);

using SparseEvaluator = std::function<double(const SparseVector&)>;

/// Convexity defect of an evaluator over an explicit sample of combinations.
DefectReport convexity_defect_sampled(const SparseEvaluator& f, std::span<const SparseTriple> sample,
                                      std::optional<std::uint64_t> seed = std::nullopt);

/// sup over pairs of |f(x+y) - f(x) - f(y)| / (||x|| + ||y||); pairs with
/// x = y = 0 are skipped.
DefectReport quasi_additivity_constant(const SparseEvaluator& f,
                                       std::span<const std::pair<SparseVector, SparseVector>> pairs,
                                       NormKind norm, std::optional<std::uint64_t> seed = std::nullopt);

struct ChainReport {
  double lhs = 0;  // |f(sum x_i) - sum f(x_i)|
  double rhs = 0;  // Q * sum_i i * gauge(x_i)
  bool holds = true;
  std::string to_json() const;
};

/// Checks the telescoped quasi-additivity bound; the inequality is verified,
/// not assumed.
ChainReport chain_inequality_check(const SparseEvaluator& f, std::span<const SparseVector> x_list,
                                   double quasi_constant, const SparseEvaluator& gauge);

/// Seeded sparse-vector sampling for reproducible defect measurements.
struct SparseSampleParams {
  std::int64_t max_index = 32;
  int max_support = 6;
  int value_denom_power = 6;  // values are multiples of 2^-power
  double value_span = 2.0;    // values drawn from (-span, span), or (0, span] if nonnegative
  bool nonnegative = false;
  bool allow_zero = false;
};

SparseVector sample_sparse_vector(Rng& rng, const SparseSampleParams& params);
std::vector<std::pair<SparseVector, SparseVector>> sample_sparse_pairs(std::uint64_t seed, std::size_t count,
                                                                       const SparseSampleParams& params);
std::vector<SparseTriple> sample_sparse_triples(std::uint64_t seed, std::size_t count,
                                                const SparseSampleParams& params);

}  // namespace convlab
