#include "convlab/grid_domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include <nlohmann/json.hpp>

#include "convlab/errors.hpp"

namespace convlab {

namespace {

std::int64_t pow2(int k) { return std::int64_t{1} << k; }

// Counts are computed in double so that an astronomically large request
// fails the cap test instead of overflowing.
void check_point_cap(double count, const GridLimits& limits) {
  if (!(count <= static_cast<double>(limits.max_points))) {
    std::ostringstream os;
    os << "grid would hold " << count << " points, cap is " << limits.max_points;
    throw SizeLimitError(os.str());
  }
}

double binomial_d(double n, double k) {
  if (k < 0 || k > n) return 0;
  double r = 1;
  for (double i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

std::string body_kind_name(BodyKind kind) {
  switch (kind) {
    case BodyKind::Simplex: return "simplex";
    case BodyKind::Cube: return "cube";
    case BodyKind::BallSup: return "ball_sup";
    case BodyKind::BallEuclid: return "ball_euclid";
    case BodyKind::PositiveConeSection: return "positive_cone_section";
  }
  throw ParameterError("unknown body kind");
}

BodyKind body_kind_from_name(const std::string& name) {
  if (name == "simplex") return BodyKind::Simplex;
  if (name == "cube") return BodyKind::Cube;
  if (name == "ball_sup") return BodyKind::BallSup;
  if (name == "ball_euclid") return BodyKind::BallEuclid;
  if (name == "positive_cone_section") return BodyKind::PositiveConeSection;
  throw ParameterError("unknown body kind '" + name + "'");
}

GridLimits GridLimits::from_env() {
  GridLimits limits;
  if (const char* p = std::getenv("CONVLAB_MAX_POINTS")) limits.max_points = std::strtoull(p, nullptr, 10);
  if (const char* t = std::getenv("CONVLAB_MAX_TRIPLES")) limits.max_triples = std::strtoull(t, nullptr, 10);
  return limits;
}

std::size_t GridDomain::VecHash::operator()(const std::vector<Coord>& v) const {
  std::size_t h = 0x9e3779b97f4a7c15ULL ^ v.size();
  for (Coord c : v) {
    h ^= static_cast<std::size_t>(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

GridDomain::GridDomain(BodyKind kind, int dim, int denom_power, std::vector<std::vector<Coord>> points)
    : body_kind_(kind), dim_(dim), denom_power_(denom_power), points_(std::move(points)) {
  if (dim_ < 1) throw ParameterError("dim must be positive");
  if (denom_power_ < 0) throw ParameterError("denom_power must be nonnegative");
  const std::int64_t den = pow2(denom_power_);
  index_.reserve(points_.size());
  for (std::size_t id = 0; id < points_.size(); ++id) {
    const auto& p = points_[id];
    if (static_cast<int>(p.size()) != dim_) throw ParameterError("point arity does not match dim");
    // Exact membership in the named body.
    switch (body_kind_) {
      case BodyKind::Simplex: {
        std::int64_t sum = 0;
        for (Coord c : p) {
          if (c < 0) throw ParameterError("simplex point with negative coordinate");
          sum += c;
        }
        if (sum != den) throw ParameterError("simplex point does not sum to 1");
        break;
      }
      case BodyKind::Cube:
      case BodyKind::BallSup:
        for (Coord c : p) {
          if (c < -den || c > den) throw ParameterError("cube point outside [-1,1]");
        }
        break;
      case BodyKind::BallEuclid: {
        std::int64_t sq = 0;
        for (Coord c : p) sq += c * c;
        if (sq > den * den) throw ParameterError("point outside the euclidean ball");
        break;
      }
      case BodyKind::PositiveConeSection:
        for (Coord c : p) {
          if (c < 0 || c > den) throw ParameterError("point outside [0,1]");
        }
        break;
    }
    if (!index_.emplace(p, id).second) throw ParameterError("duplicate grid point");
  }
}

std::vector<double> GridDomain::point_values(std::size_t id) const {
  const double den = static_cast<double>(pow2(denom_power_));
  std::vector<double> out(points_[id].size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<double>(points_[id][i]) / den;
  return out;
}

std::size_t GridDomain::find(std::span<const Coord> numerators) const {
  std::vector<Coord> key(numerators.begin(), numerators.end());
  auto it = index_.find(key);
  return it == index_.end() ? npos : it->second;
}

namespace {

// Enumerates nonnegative integer tuples of length n summing to `total`,
// lexicographically.
void compositions_rec(int n, std::int64_t total, std::vector<GridDomain::Coord>& cur,
                      std::vector<std::vector<GridDomain::Coord>>& out) {
  if (n == 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (std::int64_t v = 0; v <= total; ++v) {
    cur.push_back(v);
    compositions_rec(n - 1, total - v, cur, out);
    cur.pop_back();
  }
}

}  // namespace

GridDomain make_simplex_grid(int n_coords, int denom_power, const GridLimits& limits) {
  if (n_coords < 1) throw ParameterError("n_coords must be >= 1");
  if (denom_power < 0) throw ParameterError("denom_power must be >= 0");
  const std::int64_t den = pow2(denom_power);
  check_point_cap(binomial_d(static_cast<double>(den + n_coords - 1), n_coords - 1), limits);
  std::vector<std::vector<GridDomain::Coord>> pts;
  std::vector<GridDomain::Coord> cur;
  compositions_rec(n_coords, den, cur, pts);
  return GridDomain(BodyKind::Simplex, n_coords, denom_power, std::move(pts));
}

namespace {

// Lexicographic product enumeration of per-coordinate ranges [lo, hi].
std::vector<std::vector<GridDomain::Coord>> box_points(int dim, std::int64_t lo, std::int64_t hi) {
  std::vector<std::vector<GridDomain::Coord>> out;
  std::vector<GridDomain::Coord> cur(dim, lo);
  for (;;) {
    out.push_back(cur);
    int i = dim - 1;
    while (i >= 0 && cur[i] == hi) {
      cur[i] = lo;
      --i;
    }
    if (i < 0) break;
    ++cur[i];
  }
  return out;
}

double ipow(double base, int exp) {
  double r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

GridDomain make_cube_grid(int dim, int denom_power, const GridLimits& limits) {
  if (dim < 1) throw ParameterError("dim must be >= 1");
  if (denom_power < 0) throw ParameterError("denom_power must be >= 0");
  const std::int64_t den = pow2(denom_power);
  check_point_cap(ipow(static_cast<double>(2 * den + 1), dim), limits);
  return GridDomain(BodyKind::Cube, dim, denom_power, box_points(dim, -den, den));
}

GridDomain make_ball_grid(int dim, int denom_power, BodyKind norm_kind, const GridLimits& limits) {
  if (dim < 1) throw ParameterError("dim must be >= 1");
  if (norm_kind != BodyKind::BallSup && norm_kind != BodyKind::BallEuclid) {
    throw ParameterError("ball norm must be ball_sup or ball_euclid");
  }
  const std::int64_t den = pow2(denom_power);
  check_point_cap(ipow(static_cast<double>(2 * den + 1), dim), limits);
  auto pts = box_points(dim, -den, den);
  if (norm_kind == BodyKind::BallEuclid) {
    std::erase_if(pts, [&](const std::vector<GridDomain::Coord>& p) {
      std::int64_t sq = 0;
      for (auto c : p) sq += c * c;
      return sq > den * den;
    });
  }
  return GridDomain(norm_kind, dim, denom_power, std::move(pts));
}

GridDomain make_positive_section_grid(int dim, int denom_power, const GridLimits& limits) {
  if (dim < 1) throw ParameterError("dim must be >= 1");
  const std::int64_t den = pow2(denom_power);
  check_point_cap(ipow(static_cast<double>(den + 1), dim), limits);
  return GridDomain(BodyKind::PositiveConeSection, dim, denom_power, box_points(dim, 0, den));
}

SampledFunction::SampledFunction(std::shared_ptr<const GridDomain> domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (!domain_) throw ParameterError("SampledFunction requires a domain");
  if (values_.size() != domain_->size()) throw ParameterError("value count does not match point count");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw EvaluationError("non-finite value at point id " + std::to_string(i));
    }
  }
}

TripleSet enumerate_convex_triples(std::shared_ptr<const GridDomain> domain, int t_denominator_power,
                                   const GridLimits& limits) {
  if (!domain) throw ParameterError("null domain");
  if (t_denominator_power < 0) throw ParameterError("t power must be >= 0");
  const GridDomain& d = *domain;
  const std::int64_t tden = pow2(t_denominator_power);
  const std::size_t n = d.size();
  const double candidates = static_cast<double>(n) * static_cast<double>(n) * static_cast<double>(tden + 1);
  if (!(candidates <= static_cast<double>(limits.max_triples))) {
    std::ostringstream os;
    os << "triple scan of " << candidates << " candidates exceeds cap " << limits.max_triples;
    throw SizeLimitError(os.str());
  }

  TripleSet result;
  result.domain = domain;
  const int dim = d.dim();
  std::vector<GridDomain::Coord> combo(dim);
  for (std::size_t x = 0; x < n; ++x) {
    auto px = d.point(x);
    for (std::size_t y = 0; y < n; ++y) {
      auto py = d.point(y);
      for (std::int64_t a = 0; a <= tden; ++a) {
        // t*x + (1-t)*y over 2^k: numerator (a*px + (tden-a)*py) / tden,
        // a grid point exactly when tden divides every coordinate.
        bool on_grid = true;
        for (int i = 0; i < dim; ++i) {
          const std::int64_t num = a * px[i] + (tden - a) * py[i];
          if (num % tden != 0) {
            on_grid = false;
            break;
          }
          combo[i] = num / tden;
        }
        if (!on_grid) continue;
        const std::size_t id = d.find(combo);
        if (id == GridDomain::npos) continue;  // inside the body but off-grid cannot happen; keep the guard
        result.triples.push_back(ConvexTriple{x, y, a, t_denominator_power, id});
      }
    }
  }
  return result;
}

MidpointSet enumerate_midpoint_pairs(std::shared_ptr<const GridDomain> domain, const GridLimits& limits) {
  if (!domain) throw ParameterError("null domain");
  const GridDomain& d = *domain;
  const std::size_t n = d.size();
  if (!(static_cast<double>(n) * static_cast<double>(n) <= static_cast<double>(limits.max_triples))) {
    throw SizeLimitError("midpoint scan of " + std::to_string(n) + "^2 candidates exceeds cap " +
                         std::to_string(limits.max_triples));
  }
  MidpointSet result;
  result.domain = domain;
  const int dim = d.dim();
  std::vector<GridDomain::Coord> mid(dim);
  for (std::size_t x = 0; x < n; ++x) {
    auto px = d.point(x);
    for (std::size_t y = 0; y < n; ++y) {
      auto py = d.point(y);
      bool on_grid = true;
      for (int i = 0; i < dim; ++i) {
        const std::int64_t num = px[i] + py[i];
        if (num % 2 != 0) {
          on_grid = false;
          break;
        }
        mid[i] = num / 2;
      }
      if (!on_grid) continue;
      const std::size_t id = d.find(mid);
      if (id == GridDomain::npos) continue;
      result.pairs.push_back(MidpointPair{x, y, id});
    }
  }
  return result;
}

SampledFunction sample_function(std::shared_ptr<const GridDomain> domain, const PointEvaluator& evaluator) {
  if (!domain) throw ParameterError("null domain");
  std::vector<double> values(domain->size());
  for (std::size_t id = 0; id < domain->size(); ++id) {
    const auto coords = domain->point_values(id);
    const double v = evaluator(coords);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "evaluator returned non-finite value at point (";
      for (std::size_t i = 0; i < coords.size(); ++i) os << (i ? "," : "") << coords[i];
      os << ")";
      throw EvaluationError(os.str());
    }
    values[id] = v;
  }
  return SampledFunction(domain, std::move(values));
}

std::string GridDomain::to_json() const {
  nlohmann::json j;
  j["body_kind"] = body_kind_name(body_kind_);
  j["dim"] = dim_;
  j["denom_power"] = denom_power_;
  j["points"] = points_;
  return j.dump();
}

GridDomain GridDomain::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  return GridDomain(body_kind_from_name(j.at("body_kind").get<std::string>()), j.at("dim").get<int>(),
                    j.at("denom_power").get<int>(),
                    j.at("points").get<std::vector<std::vector<Coord>>>());
}

}  // namespace convlab
