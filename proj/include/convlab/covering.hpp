#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "convlab/rational.hpp"
#include "convlab/rng.hpp"

namespace convlab {

/// The combinatorial covering system: S = {1..m} with m = (1+eps)n, Omega all
/// n-subsets of S (lexicographic), A_i = { omega : i in omega }. Constructed
/// fully and checked exactly.
class CoveringSystem {
 public:
  CoveringSystem(const Rational& eps, int n, std::size_t max_omega = 1'000'000);

  const Rational& eps() const { return eps_; }
  int n() const { return n_; }
  int m() const { return m_; }
  std::size_t omega_size() const { return omega_.size(); }

  /// Members of ground-set S are 1-based; omega sets are bitmasks over S.
  std::uint64_t omega_mask(std::size_t w) const { return omega_[w]; }
  std::vector<int> omega_elements(std::size_t w) const;
  bool in_A(int i, std::size_t w) const { return (omega_[w] >> (i - 1)) & 1; }
  std::size_t a_size() const;  // |A_i| = C(m-1, n-1), same for every i

  std::string to_json() const;
  static CoveringSystem from_json(const std::string& text);

 private:
  Rational eps_;
  int n_;
  int m_;
  std::vector<std::uint64_t> omega_;
};

struct SmallUnionEntry {
  std::vector<int> J;
  std::size_t witness_omega = 0;  // an omega disjoint from J, hence outside every A_i, i in J
};

struct SmallUnionReport {
  bool passed = false;
  std::size_t sets_checked = 0;
  std::vector<SmallUnionEntry> entries;
};

/// Exhaustively checks that no union of at most eps*n of the A_i covers
/// Omega, exhibiting a missed omega for every such index set J.
SmallUnionReport verify_small_union(const CoveringSystem& cs, std::size_t max_sets = 10'000'000);

struct PartitionSumReport {
  bool passed = false;
  int expected = 0;  // n
};

/// Exact check that sum_i 1_{A_i} = n 1_Omega.
PartitionSumReport verify_partition_sum(const CoveringSystem& cs);

/// Optimal coefficient choice for the p-quasi-norm with its witnesses.
struct QuasiNormCertificate {
  Rational p;
  std::vector<Rational> c;  // one coefficient per ground-set element
  double objective = 0;     // (sum c_i^p)^(1/p)
  std::vector<std::size_t> active_omegas;  // rows with sum_{i in omega} c_i = |f(omega)| exactly
  std::size_t vertex_count = 0;            // vertices enumerated for the minimum

  std::string to_json() const;
};

/// Exact feasibility of the certificate for |f|: sum_{i in omega} c_i >= |f_omega|.
bool certificate_feasible(const CoveringSystem& cs, const QuasiNormCertificate& cert,
                          std::span<const Rational> f);

/// All vertices of { c >= 0 : sum_{i in omega} c_i >= |f(omega)| }, found by
/// exact integer double-description over the homogenization cone. Degenerate
/// vertices are handled combinatorially, so none are dropped.
std::vector<std::vector<Rational>> covering_polyhedron_vertices(const CoveringSystem& cs,
                                                                std::span<const Rational> f);

/// ||f||_p = inf { (sum c_i^p)^(1/p) : |f| <= sum c_i 1_{A_i} } for 0 < p <= 1.
/// The objective is concave on the feasible polyhedron, so the minimum sits
/// at a vertex; every vertex is enumerated exactly and the best is returned
/// (ties resolved to the lexicographically least coefficient vector).
QuasiNormCertificate quasi_norm(const CoveringSystem& cs, std::span<const Rational> f, const Rational& p);

/// Independent oracle: enumerate every support pattern T and every |T|-subset
/// of rows, solve the square rational system, and keep the feasible basic
/// solutions. Exponential; intended for m <= 6.
struct BruteForceResult {
  std::vector<std::vector<Rational>> vertices;
  QuasiNormCertificate best;
};
BruteForceResult brute_force_quasi_norm(const CoveringSystem& cs, std::span<const Rational> f,
                                        const Rational& p);

/// Closed-form lower bound n^(1/p - 1) eps^(1/p) / (1 + eps) for ||1_Omega||_p.
double quasi_norm_lower_bound(const CoveringSystem& cs, const Rational& p);

/// The counting step behind the lower bound: for a feasible c covering 1_Omega,
/// J = { i : c_i >= 1/m } must have more than eps*n elements.
bool counting_bound_holds(const CoveringSystem& cs, std::span<const Rational> c);

/// Norm of the dual functional: max_i sum_{omega in A_i} |g(omega)|.
Rational dual_norm(const CoveringSystem& cs, std::span<const Rational> g);

/// Banach-envelope norm computed by the bipolar LP
/// sup { <f, g> : dual_norm(g) <= 1 }, solved in exact rational arithmetic.
Rational envelope_norm(const CoveringSystem& cs, std::span<const Rational> f);

struct EnvelopeGapRow {
  int n = 0;
  double quasi_norm_value = 0;
  double lower_bound = 0;     // closed-form counting bound for ||1_Omega||_p
  double envelope_value = 0;  // always 1 + eps for f = 1_Omega
  double ratio = 0;           // quasi_norm / envelope
  double ratio_bound = 0;     // n^(1/p-1) eps^(1/p) / (1+eps)^2
};

struct EnvelopeGapReport {
  Rational eps;
  Rational p;
  std::vector<EnvelopeGapRow> rows;
  bool passed = false;

  std::string to_csv() const;
};

/// Non-local-convexity growth table for f = 1_Omega across block sizes.
EnvelopeGapReport envelope_gap_report(const Rational& eps, std::span<const int> n_list, const Rational& p);

/// Containment test B subset theta*B + kappa*A on sampled points of B, where
/// B is the convex hull of the generators and A their p-convex hull.
struct PThetaKappaReport {
  bool passed = false;
  double worst_residual = 0;
  double allowed = 0;  // theta * outer radius
  std::vector<double> worst_point;
  std::string to_json() const;
};

enum class RoundingOracle {
  SignVector,      // u = sgn(y), valid when the generators are the sign vectors
  GeneratorSearch  // scan generators with dyadic weights
};

PThetaKappaReport pthetakappa_check(std::span<const std::vector<double>> generators, const Rational& p,
                                    double theta, double kappa, std::size_t samples, std::uint64_t seed,
                                    RoundingOracle oracle = RoundingOracle::SignVector);

/// One contraction step: given y', produce x with ||y' - x/2|| <= (1/2+eps)||y'||.
using HalfOracle = std::function<std::vector<double>(const std::vector<double>&)>;

/// The scaled sign-vector oracle on the sup-norm cube (exact halving).
HalfOracle sign_vector_oracle();

struct PreimageResult {
  std::vector<double> coefficients;          // (1/2+eps)^(i-1) per step
  std::vector<std::vector<double>> vectors;  // unit-ball vectors x_i
  std::vector<double> residual_trace;        // ||y_k|| after each step
  double p_sum = 0;                          // sum of coefficients^p
  double p_sum_bound = 0;                    // 1 / (1 - (1/2+eps)^p)

  std::string to_csv() const;
};

/// Geometric-decay reconstruction y ~ (1/2) sum_i (1/2+eps)^(i-1) x_i driven
/// by the half oracle; the contraction contract is verified at every step.
PreimageResult iterative_preimage(const HalfOracle& oracle, std::vector<double> y, double eps, int k_max,
                                  const Rational& p);

}  // namespace convlab
