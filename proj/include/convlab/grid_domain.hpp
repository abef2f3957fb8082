#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace convlab {

enum class BodyKind {
  Simplex,             // nonnegative coordinates summing to 1
  Cube,                // coordinates in [-1, 1]
  BallSup,             // sup-norm <= 1 (same point set as the cube)
  BallEuclid,          // euclidean norm <= 1
  PositiveConeSection  // coordinates in [0, 1]
};

std::string body_kind_name(BodyKind kind);
BodyKind body_kind_from_name(const std::string& name);

/// Enumeration limits. Enumeration is the verification method here, so a
/// blowup must fail loudly instead of silently sampling.
struct GridLimits {
  std::size_t max_points = 2'000'000;
  std::size_t max_triples = 100'000'000;  // candidate combinations scanned

  /// Reads CONVLAB_MAX_POINTS / CONVLAB_MAX_TRIPLES when set.
  static GridLimits from_env();
};

/// A finite set of points with dyadic rational coordinates inside a named
/// convex body. Coordinates are stored as integer numerators over 2^k, so
/// every membership and combination question is decided in exact integer
/// arithmetic. Immutable after construction.
class GridDomain {
 public:
  using Coord = std::int64_t;

  GridDomain(BodyKind kind, int dim, int denom_power, std::vector<std::vector<Coord>> points);

  BodyKind body_kind() const { return body_kind_; }
  int dim() const { return dim_; }
  int denom_power() const { return denom_power_; }
  std::size_t size() const { return points_.size(); }

  /// Numerators of point `id`; the implied denominator is 2^denom_power.
  std::span<const Coord> point(std::size_t id) const { return points_[id]; }

  /// Point coordinates as doubles (exact: dyadic rationals).
  std::vector<double> point_values(std::size_t id) const;

  /// Exact lookup. Returns npos when the coordinates are not a grid point.
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t find(std::span<const Coord> numerators) const;

  std::string to_json() const;
  static GridDomain from_json(const std::string& text);

 private:
  struct VecHash {
    std::size_t operator()(const std::vector<Coord>& v) const;
  };

  BodyKind body_kind_;
  int dim_;
  int denom_power_;
  std::vector<std::vector<Coord>> points_;
  std::unordered_map<std::vector<Coord>, std::size_t, VecHash> index_;
};

GridDomain make_simplex_grid(int n_coords, int denom_power, const GridLimits& limits = {});
GridDomain make_cube_grid(int dim, int denom_power, const GridLimits& limits = {});
GridDomain make_ball_grid(int dim, int denom_power, BodyKind norm_kind, const GridLimits& limits = {});
GridDomain make_positive_section_grid(int dim, int denom_power, const GridLimits& limits = {});

/// Real values attached to every point of a GridDomain.
class SampledFunction {
 public:
  SampledFunction(std::shared_ptr<const GridDomain> domain, std::vector<double> values);

  const GridDomain& domain() const { return *domain_; }
  const std::shared_ptr<const GridDomain>& domain_ptr() const { return domain_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t id) const { return values_[id]; }
  std::size_t size() const { return values_.size(); }

 private:
  std::shared_ptr<const GridDomain> domain_;
  std::vector<double> values_;
};

/// A grid-closed convex combination: t*x + (1-t)*y lands exactly on combo.
/// t = t_num / 2^t_denom_power.
struct ConvexTriple {
  std::size_t x_id = 0;
  std::size_t y_id = 0;
  std::int64_t t_num = 0;
  int t_denom_power = 0;
  std::size_t combo_id = 0;

  double t() const { return static_cast<double>(t_num) / static_cast<double>(std::int64_t{1} << t_denom_power); }
};

struct MidpointPair {
  std::size_t x_id = 0;
  std::size_t y_id = 0;
  std::size_t mid_id = 0;
};

/// Triples bound to the domain they were enumerated on, so a foreign test
/// set can be rejected.
struct TripleSet {
  std::shared_ptr<const GridDomain> domain;
  std::vector<ConvexTriple> triples;
};

struct MidpointSet {
  std::shared_ptr<const GridDomain> domain;
  std::vector<MidpointPair> pairs;
};

/// All (x, y, t = a/2^j) whose combination lands exactly on a grid point,
/// in lexicographic (x_id, y_id, a) order. Integer arithmetic only.
TripleSet enumerate_convex_triples(std::shared_ptr<const GridDomain> domain, int t_denominator_power,
                                   const GridLimits& limits = {});

/// The t = 1/2 slice of the above.
MidpointSet enumerate_midpoint_pairs(std::shared_ptr<const GridDomain> domain, const GridLimits& limits = {});

using PointEvaluator = std::function<double(std::span<const double>)>;

/// values[i] = evaluator(points[i]); rejects non-finite values.
SampledFunction sample_function(std::shared_ptr<const GridDomain> domain, const PointEvaluator& evaluator);

}  // namespace convlab
