#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "convlab/grid_domain.hpp"
#include "convlab/lp.hpp"

namespace convlab {

/// Greatest convex minorant of the sampled values, evaluated at every grid
/// point: co f(x) = min { sum t_i f(x_i) : x = sum t_i x_i, sum t_i = 1,
/// t >= 0 }. One LP per query point, solved in supporting-hyperplane form
/// (max <a,x>+b subject to <a,x_i>+b <= f_i, same optimal value with far
/// fewer columns). Points are independent and run across threads.
SampledFunction convex_minorant(const SampledFunction& f, const LpOptions& options = {}, int threads = 0);

struct ConvexDistanceResult {
  double distance = 0;            // max |f - g|, which equals (1/2) max(f - co f)
  SampledFunction nearest;        // g = co f + distance
  SampledFunction minorant;       // co f itself
};

/// Distance from f to the convex class, attained at g = co f + d.
ConvexDistanceResult distance_to_convex(const SampledFunction& f, const LpOptions& options = {},
                                        int threads = 0);

/// One inequality g(x) <= sum_i weights[i] * g(support[i]) that every
/// restriction of a convex function to the grid satisfies.
struct ConvexityConstraint {
  std::size_t point = 0;
  std::vector<std::size_t> support;
  std::vector<double> weights;  // strictly positive, summing to 1
};

/// All binding convex-combination inequalities with affinely independent
/// support of size <= dim+1. By the basic-solution argument these imply the
/// inequality for every decomposition, so feasibility of the list is exactly
/// extendability to a convex function on the hull. Membership and weights are
/// decided in exact rational arithmetic.
std::vector<ConvexityConstraint> grid_convexity_constraints(const GridDomain& domain,
                                                            std::size_t cap = 10'000'000);

/// Cross-check route for distance_to_convex: the LP minimizing max |f - g|
/// over grid-convex g described by the constraint list. Solved in its dual
/// form (a signed measure of total variation one that annihilates every
/// grid-convex function), which keeps the simplex dictionary short and
/// well-conditioned; the value coincides by LP duality.
double distance_to_convex_direct(const SampledFunction& f,
                                 std::span<const ConvexityConstraint> constraints,
                                 const LpOptions& options = {});

struct AffineFitResult {
  std::vector<double> coeffs;  // a_1..a_dim, then the constant term
  double distance = 0;
};

/// Chebyshev best affine fit: minimizes max_i |f(x_i) - (<a, x_i> + b)|.
AffineFitResult best_affine_fit(const SampledFunction& f, const LpOptions& options = {});

struct LineFitResult {
  double slope = 0;
  double intercept = 0;
  double distance = 0;
};

/// One-dimensional Chebyshev fit over arbitrary (t, value) samples.
LineFitResult best_affine_fit_1d(std::span<const double> ts, std::span<const double> values,
                                 const LpOptions& options = {});

struct JensenFitResult {
  SampledFunction fit;
  double distance = 0;
};

/// Minimizes max |f - g| subject to g(mid) = (g(x)+g(y))/2 for every
/// enumerated midpoint pair of the grid.
JensenFitResult best_jensen_fit(const SampledFunction& f, const LpOptions& options = {});
JensenFitResult best_jensen_fit(const SampledFunction& f, const MidpointSet& pairs,
                                const LpOptions& options = {});

}  // namespace convlab
