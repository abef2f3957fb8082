#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "convlab/sparse_vector.hpp"

namespace convlab {

/// R(x) = sum_i x_i log2|x_i| - (sum_i x_i) log2|sum_i x_i|, with 0 log 0 = 0.
/// Computed through the ratios x_i / sum so that scaling by a power of two is
/// bit-exact.
double ribe(const SparseVector& x);

/// K(x) = sum_i x~_i log2(i) on x >= 0 (x~ the decreasing rearrangement),
/// extended by K(x) = K(x+) - K(x-). Logarithm taken base 2.
double kalton_map(const SparseVector& x);

/// -sum_i x_i log2(x_i) for a point of the simplex (0 log 0 = 0).
double entropy_simplex(std::span<const double> x);

/// min{ n >= 0 : max_i x_i >= 2^-n }. Requires x nonzero and nonnegative.
int cholewa_kominek_omega(const SparseVector& x);

/// -log2 ||x||. Requires x != 0.
double neg_log_norm(const SparseVector& x, NormKind norm);

/// -log2(max_n t_n) on simplex points.
double simplex_max_counterexample(std::span<const double> x);

/// Configuration of the pasted one-dimensional pieces F_n.
struct FStarConfig {
  enum class Variant { Nested, Blocks };
  Variant variant = Variant::Nested;

  /// theta(n) in (0,1), strictly increasing to 1. The default makes
  /// -log2(1 - theta(n)) = n, so tables come out integer-exact.
  std::function<double(int)> theta = dyadic_theta;
  static double dyadic_theta(int n) { return 1.0 - std::pow(2.0, -n); }

  /// Blocks variant: consecutive disjoint coordinate blocks of these sizes.
  /// Each block uses theta evaluated at its own size.
  std::vector<int> block_sizes;

  static FStarConfig nested();
  static FStarConfig blocks(std::vector<int> sizes);
};

/// F*(x) = max_{n <= n_max} F_n(x) with
///   nested: F_n(x) = -log2 || P_n(1) - theta(n) P_n(x) ||_sup
///   blocks: F_B(x) = -log2 || 1_B - theta(|B|) x|_B ||_sup per block B.
/// Coordinates of x must lie in [0,1]; coordinates beyond x.size() are zero.
/// n_max < 0 selects the smallest range that already equals the full
/// supremum on this input (prefixes covering the support / all blocks).
double f_star(std::span<const double> x, const FStarConfig& config, int n_max = -1);

struct GrowthRow {
  int n = 0;
  double flat_value = 0;    // value at the spread-out point of scale n
  double extreme_max = 0;   // largest value over the extreme points of scale n
  double lower_bound = 0;   // closed-form divergence bound for this row
};

struct GrowthReport {
  std::string family;
  std::vector<GrowthRow> rows;

  std::string to_csv() const;
  std::string to_dat() const;  // gnuplot-friendly whitespace table
};

enum class GrowthFamily { Omega, Entropy, SimplexMax, FStar };

GrowthFamily growth_family_from_name(const std::string& name);

/// Divergence tables: value at the flat point vs. the extreme points.
///   omega:       flat 2^-n sum_{i<=2^n} e_i (value n), extremes e_i (value 0)
///   entropy:     flat uniform on n coordinates (log2 n), extremes vertices (0)
///   simplex_max: same points as entropy
///   f_star:      blocks variant, one block of size n; flat point the average
///                of the q_i = 1_B - e_i, extremes the q_i themselves.
GrowthReport growth_report(GrowthFamily family, std::span<const int> n_range);

}  // namespace convlab
