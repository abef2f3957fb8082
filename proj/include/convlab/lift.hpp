#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "convlab/convex_fit.hpp"
#include "convlab/defect.hpp"
#include "convlab/grid_domain.hpp"
#include "convlab/sparse_vector.hpp"

namespace convlab {

/// Samples of a function along one line through the origin. Samples sit at
/// t = j * step for consecutive integers j_min <= 0 <= j_max, so midpoint
/// structure is available exactly.
struct LiftLine {
  std::vector<std::int64_t> dir;  // primitive integer direction, first nonzero positive
  std::vector<double> unit;       // dir scaled to unit length in the lift's norm
  std::int64_t j_min = 0;
  std::int64_t j_max = 0;
  double step = 0;
  std::vector<double> values;  // f at j = j_min .. j_max
  double exit_neg = 0;         // body exit radius along -unit (positive number)
  double exit_pos = 0;         // body exit radius along +unit

  double t_at(std::int64_t j) const { return static_cast<double>(j) * step; }
  double value_at(std::int64_t j) const { return values[static_cast<std::size_t>(j - j_min)]; }
};

struct FittedLine {
  LiftLine line;
  double slope = 0;
  double fit_error = 0;   // optimal 1-D Chebyshev / Jensen distance on the line
  double drop_error = 0;  // max_t |f(tu) - f(0) - slope t| after dropping the constant
};

enum class LiftPolicy { ExactRayOnly, NearestDirection };

/// Positively homogeneous extension assembled from per-line fits: degree 1
/// from best affine fits, degree 2 from best Jensen fits (both reduce to a
/// slope per line on dyadic line grids; the degree records which identity the
/// construction carries). Evaluation is exact-ray by default: a point whose
/// direction was never sampled is an error unless NearestDirection is chosen,
/// in which case the angular mismatch is reported alongside the value.
struct Int64VecHash {
  std::size_t operator()(const std::vector<std::int64_t>& v) const;
};

class RadialLift {
 public:
  RadialLift(int degree, NormKind norm, double f_at_origin, std::vector<FittedLine> lines);

  int degree() const { return degree_; }
  NormKind norm() const { return norm_; }
  double f_at_origin() const { return f0_; }
  std::span<const FittedLine> lines() const { return lines_; }

  double max_fit_error() const;
  double max_drop_error() const;
  double min_exit_radius() const;  // r0 over the sampled lines
  double max_exit_radius() const;  // R0 over the sampled lines

  struct Evaluation {
    double value = 0;
    double angular_error = 0;  // 1 - |cos| against the ray actually used
  };

  /// Value of the lift at the dyadic point numerators/2^denom_power.
  Evaluation evaluate(std::span<const std::int64_t> numerators, int denom_power,
                      LiftPolicy policy = LiftPolicy::ExactRayOnly) const;

 private:
  int degree_;
  NormKind norm_;
  double f0_;
  std::vector<FittedLine> lines_;
  std::unordered_map<std::vector<std::int64_t>, std::size_t, Int64VecHash> index_;
};

/// Primitive integer directions of the nonzero grid points, deduplicated by
/// parallelism, in first-occurrence order.
std::vector<std::vector<std::int64_t>> all_grid_directions(const GridDomain& domain);

/// Lines through the origin of a grid whose body contains 0 (cube, balls,
/// positive sections); the grid must contain the origin point. Exit radii are
/// the exact body exit radii in the chosen norm.
std::vector<LiftLine> lines_from_grid(const SampledFunction& f, NormKind norm);

/// Lines for an evaluator on the unit ball of `norm`: t = i / 2^grid_power
/// over [-1, 1] along each direction.
std::vector<LiftLine> lines_from_evaluator(const PointEvaluator& f, int dim,
                                           std::span<const std::vector<std::int64_t>> directions,
                                           int grid_power, NormKind norm);

/// Lines through `center_id` of an arbitrary grid, parameterized in the given
/// norm; exit radii are taken from the sampled extent (a lower estimate).
std::vector<LiftLine> lines_from_grid_recentered(const SampledFunction& f, std::size_t center_id,
                                                 NormKind norm);

/// Chebyshev-fit every line and assemble the degree-1 homogeneous lift.
RadialLift radial_affine_lift(std::vector<LiftLine> lines, NormKind norm, const LpOptions& options = {});

/// Jensen-fit every line (midpoint identities on the uniform line grid) and
/// assemble the degree-2 homogeneous lift.
RadialLift radial_jensen_lift(std::vector<LiftLine> lines, NormKind norm, const LpOptions& options = {});

/// Best Jensen fit on one uniform line grid: minimizes the sup distance
/// subject to g((j+j')/2) = (g(j)+g(j'))/2 for every same-parity pair.
LineFitResult best_jensen_fit_1d(const LiftLine& line, const LpOptions& options = {});

/// Measured quasi-additivity constant of the lift over pairs of dyadic
/// points: sup |f*(x+y) - f*(x) - f*(y)| / (||x|| + ||y||).
struct DyadicPoint {
  std::vector<std::int64_t> numerators;
  int denom_power = 0;
};

DefectReport lift_quasilinearity(const RadialLift& lift,
                                 std::span<const std::pair<DyadicPoint, DyadicPoint>> pairs, NormKind norm,
                                 LiftPolicy policy = LiftPolicy::ExactRayOnly);

/// All unordered grid-point pairs whose sum still lies on a sampled ray.
std::vector<std::pair<DyadicPoint, DyadicPoint>> ray_closed_pairs(const GridDomain& domain,
                                                                  const RadialLift& lift,
                                                                  std::size_t cap = 10'000'000);

/// Same, with every point shifted by the lift center first.
std::vector<std::pair<DyadicPoint, DyadicPoint>> ray_closed_pairs_recentered(
    const GridDomain& domain, const RadialLift& lift, std::size_t center_id,
    std::size_t cap = 10'000'000);

/// Explicit constant accounting for the stability bounds.
struct StabilityBudget {
  double r0 = 1;
  double R0 = 1;
  double M = 1;                 // K-space constant, a declared assumption
  std::optional<double> delta;  // Jensen continuity radius, user supplied
  double epsilon = 1;
};

struct StabilityBounds {
  double affine_bound = 0;                 // (6 M R0 / r0 + 2) * eps
  std::optional<double> jensen_bound;      // (4 + R0 / delta) * eps, when delta given
  double jensen_from_affine_bound = 0;     // 2 * affine_bound
  std::string to_json() const;
};

StabilityBounds stability_bound_report(const StabilityBudget& budget);

/// Requires delta; mirrors the "missing parameter" error path.
double jensen_stability_bound(const StabilityBudget& budget);

struct RecoveryReport {
  double epsilon = 0;  // measured affinity defect of the input
  double r0 = 0;
  double R0 = 0;
  double M = 0;
  double per_line_max_error = 0;       // worst Chebyshev fit error over lines
  double per_line_max_drop_error = 0;  // after dropping the constants
  double measured_Q = 0;
  double measured_d = 0;  // sup distance between f and the recovered affine map
  double theoretical_bound = 0;
  std::vector<double> affine_coeffs;  // a_1..a_dim, constant
  std::string to_json() const;
};

/// Full pipeline: measure the affinity defect, build the radial lift, fit a
/// single linear map to it by Chebyshev approximation over all ray samples,
/// restore the best constant, and compare the achieved distance with the
/// budgeted bound.
RecoveryReport affine_recovery_experiment(const SampledFunction& f, double M_assumed, int t_power,
                                          const LpOptions& options = {});

/// The fit-and-compare tail of the experiment for an already-built lift
/// centered at grid point `center_id` (the coordinates are shifted by the
/// center throughout).
RecoveryReport recovery_from_lift(const SampledFunction& f, const RadialLift& lift,
                                  std::size_t center_id, double M_assumed, double epsilon,
                                  const LpOptions& options = {});

}  // namespace convlab
