#include "convlab/lift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "convlab/errors.hpp"

namespace convlab {

namespace {

struct CanonicalDir {
  std::vector<std::int64_t> dir;  // primitive, first nonzero positive
  std::int64_t multiple = 0;      // signed j with numerators = j * dir
};

CanonicalDir canonical_direction(std::span<const std::int64_t> numerators) {
  std::int64_t g = 0;
  for (std::int64_t v : numerators) g = std::gcd(g, v);
  if (g == 0) return {};
  CanonicalDir out;
  out.dir.resize(numerators.size());
  std::int64_t sign = 0;
  for (std::size_t i = 0; i < numerators.size(); ++i) {
    const std::int64_t reduced = numerators[i] / g;
    if (sign == 0 && reduced != 0) sign = reduced > 0 ? 1 : -1;
    out.dir[i] = reduced;
  }
  if (sign < 0) {
    for (auto& v : out.dir) v = -v;
  }
  out.multiple = sign * g;
  return out;
}

double int_vector_norm(std::span<const std::int64_t> v, NormKind kind) {
  double s = 0;
  switch (kind) {
    case NormKind::Sup:
      for (auto c : v) s = std::max(s, std::fabs(static_cast<double>(c)));
      return s;
    case NormKind::L1:
      for (auto c : v) s += std::fabs(static_cast<double>(c));
      return s;
    case NormKind::L2:
      for (auto c : v) s += static_cast<double>(c) * static_cast<double>(c);
      return std::sqrt(s);
  }
  return s;
}

double double_vector_norm(std::span<const double> v, NormKind kind) {
  double s = 0;
  switch (kind) {
    case NormKind::Sup:
      for (double c : v) s = std::max(s, std::fabs(c));
      return s;
    case NormKind::L2:
      for (double c : v) s += c * c;
      return std::sqrt(s);
    case NormKind::L1:
      for (double c : v) s += std::fabs(c);
      return s;
  }
  return s;
}

/// Exit radii of the body shifted by -center along +-u: largest t >= 0 with
/// center + t*u (resp. center - t*u) inside the body.
std::pair<double, double> body_exit_radii(BodyKind body, std::span<const double> center,
                                          std::span<const double> u) {
  const std::size_t dim = u.size();
  auto linear_exits = [&](auto&& lower_ok, auto&& upper) {
    // Intersect half-line center + t*u with per-coordinate interval bounds.
    double t_pos = std::numeric_limits<double>::infinity();
    double t_neg = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < dim; ++i) {
      const double lo = lower_ok(i), hi = upper(i);
      if (u[i] > 0) {
        t_pos = std::min(t_pos, (hi - center[i]) / u[i]);
        t_neg = std::min(t_neg, (center[i] - lo) / u[i]);
      } else if (u[i] < 0) {
        t_pos = std::min(t_pos, (center[i] - lo) / -u[i]);
        t_neg = std::min(t_neg, (hi - center[i]) / -u[i]);
      }
    }
    return std::pair{std::max(0.0, t_neg), std::max(0.0, t_pos)};
  };
  switch (body) {
    case BodyKind::Cube:
    case BodyKind::BallSup:
      return linear_exits([](std::size_t) { return -1.0; }, [](std::size_t) { return 1.0; });
    case BodyKind::PositiveConeSection:
      return linear_exits([](std::size_t) { return 0.0; }, [](std::size_t) { return 1.0; });
    case BodyKind::Simplex:
      // Nonnegativity facets only; directions are assumed to satisfy
      // sum(u) = 0 so the mass constraint stays satisfied.
      return linear_exits([](std::size_t) { return 0.0; },
                          [](std::size_t) { return std::numeric_limits<double>::infinity(); });
    case BodyKind::BallEuclid: {
      // |center + t u|_2 = 1: t^2 |u|^2 + 2 t <c,u> + |c|^2 - 1 = 0.
      double uu = 0, cu = 0, cc = 0;
      for (std::size_t i = 0; i < dim; ++i) {
        uu += u[i] * u[i];
        cu += center[i] * u[i];
        cc += center[i] * center[i];
      }
      const double disc = cu * cu - uu * (cc - 1.0);
      if (disc <= 0 || uu == 0) return {0.0, 0.0};
      const double root = std::sqrt(disc);
      return {std::max(0.0, (cu + root) / uu), std::max(0.0, (-cu + root) / uu)};
    }
  }
  return {0.0, 0.0};
}

}  // namespace

std::size_t Int64VecHash::operator()(const std::vector<std::int64_t>& v) const {
  std::size_t h = 0x2545f4914f6cdd1dULL ^ v.size();
  for (auto c : v) h ^= static_cast<std::size_t>(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

RadialLift::RadialLift(int degree, NormKind norm, double f_at_origin, std::vector<FittedLine> lines)
    : degree_(degree), norm_(norm), f0_(f_at_origin), lines_(std::move(lines)) {
  if (degree_ != 1 && degree_ != 2) throw ParameterError("lift degree must be 1 or 2");
  index_.reserve(lines_.size());
  for (std::size_t i = 0; i < lines_.size(); ++i) {
    const auto& line = lines_[i].line;
    if (line.j_min > 0 || line.j_max < 0) throw PreconditionError("line grid must bracket the origin");
    if (!index_.emplace(line.dir, i).second) throw ParameterError("parallel directions in line set");
    if (!(line.exit_neg > 0) || !(line.exit_pos > 0)) {
      throw PreconditionError("0 is not interior to the domain along a sampled direction (r0 = 0)");
    }
  }
}

double RadialLift::max_fit_error() const {
  double m = 0;
  for (const auto& l : lines_) m = std::max(m, l.fit_error);
  return m;
}

double RadialLift::max_drop_error() const {
  double m = 0;
  for (const auto& l : lines_) m = std::max(m, l.drop_error);
  return m;
}

double RadialLift::min_exit_radius() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& l : lines_) m = std::min({m, l.line.exit_neg, l.line.exit_pos});
  return m;
}

double RadialLift::max_exit_radius() const {
  double m = 0;
  for (const auto& l : lines_) m = std::max({m, l.line.exit_neg, l.line.exit_pos});
  return m;
}

RadialLift::Evaluation RadialLift::evaluate(std::span<const std::int64_t> numerators, int denom_power,
                                            LiftPolicy policy) const {
  const CanonicalDir canon = canonical_direction(numerators);
  if (canon.multiple == 0) return {0.0, 0.0};  // homogeneous: f*(0) = 0
  const double den = std::ldexp(1.0, denom_power);
  auto it = index_.find(canon.dir);
  if (it != index_.end()) {
    const double t = static_cast<double>(canon.multiple) * int_vector_norm(canon.dir, norm_) / den;
    return {lines_[it->second].slope * t, 0.0};
  }
  if (policy == LiftPolicy::ExactRayOnly) {
    throw EvaluationError("point direction was not sampled by the lift (exact-ray policy)");
  }
  // Nearest sampled direction by angle.
  double best_cos = -1;
  std::size_t best = 0;
  double best_sign = 1;
  const double xnorm2 = int_vector_norm(canon.dir, NormKind::L2);
  for (std::size_t i = 0; i < lines_.size(); ++i) {
    const auto& dir = lines_[i].line.dir;
    double dot = 0;
    for (std::size_t j = 0; j < dir.size() && j < canon.dir.size(); ++j) {
      dot += static_cast<double>(dir[j]) * static_cast<double>(canon.dir[j]);
    }
    const double cosine = dot / (xnorm2 * int_vector_norm(dir, NormKind::L2));
    if (std::fabs(cosine) > best_cos) {
      best_cos = std::fabs(cosine);
      best = i;
      best_sign = cosine >= 0 ? 1.0 : -1.0;
    }
  }
  const double t = best_sign * static_cast<double>(canon.multiple) * int_vector_norm(canon.dir, norm_) / den;
  return {lines_[best].slope * t, 1.0 - best_cos};
}

std::vector<std::vector<std::int64_t>> all_grid_directions(const GridDomain& domain) {
  std::vector<std::vector<std::int64_t>> out;
  std::unordered_map<std::vector<std::int64_t>, bool, Int64VecHash> seen;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const CanonicalDir canon = canonical_direction(domain.point(i));
    if (canon.multiple == 0) continue;
    if (seen.emplace(canon.dir, true).second) out.push_back(canon.dir);
  }
  return out;
}

namespace {

std::vector<LiftLine> lines_from_points(const GridDomain& domain, std::span<const double> values,
                                        std::span<const std::int64_t> center, NormKind norm,
                                        bool body_exits) {
  const int dim = domain.dim();
  const double den = std::ldexp(1.0, domain.denom_power());
  std::vector<double> center_values(dim);
  for (int j = 0; j < dim; ++j) center_values[j] = static_cast<double>(center[j]) / den;

  double f0 = 0;
  bool found_center = false;
  std::map<std::vector<std::int64_t>, std::map<std::int64_t, double>> by_dir;
  std::vector<std::int64_t> shifted(dim);
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const auto p = domain.point(i);
    for (int j = 0; j < dim; ++j) shifted[j] = p[j] - center[j];
    const CanonicalDir canon = canonical_direction(shifted);
    if (canon.multiple == 0) {
      f0 = values[i];
      found_center = true;
      continue;
    }
    by_dir[canon.dir][canon.multiple] = values[i];
  }
  if (!found_center) throw PreconditionError("grid does not contain the lift center");

  std::vector<LiftLine> out;
  out.reserve(by_dir.size());
  for (auto& [dir, samples] : by_dir) {
    LiftLine line;
    line.dir = dir;
    const double dnorm = int_vector_norm(dir, norm);
    line.unit.resize(dim);
    for (int j = 0; j < dim; ++j) line.unit[j] = static_cast<double>(dir[j]) / dnorm;
    line.step = dnorm / den;
    samples[0] = f0;
    line.j_min = samples.begin()->first;
    line.j_max = samples.rbegin()->first;
    line.values.reserve(static_cast<std::size_t>(line.j_max - line.j_min + 1));
    std::int64_t expect = line.j_min;
    for (const auto& [j, v] : samples) {
      if (j != expect++) throw ParameterError("grid points on a line are not consecutive multiples");
      line.values.push_back(v);
    }
    if (body_exits) {
      std::tie(line.exit_neg, line.exit_pos) = body_exit_radii(domain.body_kind(), center_values, line.unit);
    } else {
      line.exit_neg = -line.t_at(line.j_min);
      line.exit_pos = line.t_at(line.j_max);
    }
    out.push_back(std::move(line));
  }
  return out;
}

}  // namespace

std::vector<LiftLine> lines_from_grid(const SampledFunction& f, NormKind norm) {
  const std::vector<std::int64_t> origin(f.domain().dim(), 0);
  return lines_from_points(f.domain(), f.values(), origin, norm, /*body_exits=*/true);
}

std::vector<LiftLine> lines_from_grid_recentered(const SampledFunction& f, std::size_t center_id,
                                                 NormKind norm) {
  const auto c = f.domain().point(center_id);
  const bool simplex = f.domain().body_kind() == BodyKind::Simplex;
  // For the simplex the facet description gives exact exit radii; for other
  // bodies the sampled extent is used as a lower estimate.
  return lines_from_points(f.domain(), f.values(),
                           std::vector<std::int64_t>(c.begin(), c.end()), norm,
                           /*body_exits=*/simplex);
}

std::vector<LiftLine> lines_from_evaluator(const PointEvaluator& f, int dim,
                                           std::span<const std::vector<std::int64_t>> directions,
                                           int grid_power, NormKind norm) {
  if (grid_power < 0) throw ParameterError("grid power must be >= 0");
  const std::int64_t steps = std::int64_t{1} << grid_power;
  std::vector<LiftLine> out;
  std::unordered_map<std::vector<std::int64_t>, bool, Int64VecHash> seen;
  for (const auto& raw : directions) {
    if (static_cast<int>(raw.size()) != dim) throw ParameterError("direction arity mismatch");
    const CanonicalDir canon = canonical_direction(raw);
    if (canon.multiple == 0) throw ParameterError("zero direction");
    if (!seen.emplace(canon.dir, true).second) continue;  // dedupe parallels
    LiftLine line;
    line.dir = canon.dir;
    const double dnorm = int_vector_norm(canon.dir, norm);
    line.unit.resize(dim);
    for (int j = 0; j < dim; ++j) line.unit[j] = static_cast<double>(canon.dir[j]) / dnorm;
    line.j_min = -steps;
    line.j_max = steps;
    line.step = 1.0 / static_cast<double>(steps);
    line.exit_neg = line.exit_pos = 1.0;
    line.values.reserve(static_cast<std::size_t>(2 * steps + 1));
    std::vector<double> point(dim);
    for (std::int64_t j = -steps; j <= steps; ++j) {
      const double t = line.step * static_cast<double>(j);
      for (int i = 0; i < dim; ++i) point[i] = t * line.unit[i];
      const double v = f(point);
      if (!std::isfinite(v)) throw EvaluationError("line evaluator returned a non-finite value");
      line.values.push_back(v);
    }
    out.push_back(std::move(line));
  }
  return out;
}

LineFitResult best_jensen_fit_1d(const LiftLine& line, const LpOptions& options) {
  const std::int64_t count = line.j_max - line.j_min + 1;
  const std::size_t n = static_cast<std::size_t>(count);
  LinearProgram lp;
  lp.sense = Sense::Minimize;
  lp.objective.assign(n + 1, 0.0);
  lp.objective[n] = 1.0;
  lp.bounds.resize(n + 1);
  lp.bounds[n].lower = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; j += 2) {
      LinearProgram::Constraint row;
      row.coeffs.assign(n + 1, 0.0);
      row.coeffs[(i + j) / 2] += 1.0;
      row.coeffs[i] -= 0.5;
      row.coeffs[j] -= 0.5;
      row.rel = Relation::Equal;
      row.rhs = 0.0;
      lp.constraints.push_back(std::move(row));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    LinearProgram::Constraint below, above;
    below.coeffs.assign(n + 1, 0.0);
    below.coeffs[i] = 1.0;
    below.coeffs[n] = -1.0;
    below.rel = Relation::LessEq;
    below.rhs = line.values[i];
    lp.constraints.push_back(std::move(below));
    above.coeffs.assign(n + 1, 0.0);
    above.coeffs[i] = -1.0;
    above.coeffs[n] = -1.0;
    above.rel = Relation::LessEq;
    above.rhs = -line.values[i];
    lp.constraints.push_back(std::move(above));
  }
  const LpSolution sol = solve_lp(lp, options);
  if (sol.status != LpStatus::Optimal) throw SolverError("1-D Jensen fit LP did not solve");
  LineFitResult out;
  out.distance = sol.primal[n];
  if (count >= 2) {
    out.slope = (sol.primal[n - 1] - sol.primal[0]) / (line.t_at(line.j_max) - line.t_at(line.j_min));
  }
  out.intercept = sol.primal[static_cast<std::size_t>(-line.j_min)];
  return out;
}

namespace {

RadialLift build_lift(std::vector<LiftLine> lines, NormKind norm, int degree, const LpOptions& options) {
  if (lines.empty()) throw ParameterError("lift needs at least one line");
  double f0 = 0;
  bool have_f0 = false;
  std::vector<FittedLine> fitted;
  fitted.reserve(lines.size());
  for (auto& line : lines) {
    if (!have_f0) {
      f0 = line.value_at(0);
      have_f0 = true;
    }
    LineFitResult fit;
    if (degree == 1) {
      std::vector<double> ts(line.values.size());
      for (std::size_t i = 0; i < ts.size(); ++i) {
        ts[i] = line.t_at(line.j_min + static_cast<std::int64_t>(i));
      }
      fit = best_affine_fit_1d(ts, line.values, options);
    } else {
      fit = best_jensen_fit_1d(line, options);
    }
    FittedLine out;
    out.slope = fit.slope;
    out.fit_error = fit.distance;
    double drop = 0;
    for (std::int64_t j = line.j_min; j <= line.j_max; ++j) {
      drop = std::max(drop, std::fabs(line.value_at(j) - f0 - fit.slope * line.t_at(j)));
    }
    out.drop_error = drop;
    out.line = std::move(line);
    fitted.push_back(std::move(out));
  }
  return RadialLift(degree, norm, f0, std::move(fitted));
}

}  // namespace

RadialLift radial_affine_lift(std::vector<LiftLine> lines, NormKind norm, const LpOptions& options) {
  return build_lift(std::move(lines), norm, 1, options);
}

RadialLift radial_jensen_lift(std::vector<LiftLine> lines, NormKind norm, const LpOptions& options) {
  return build_lift(std::move(lines), norm, 2, options);
}

namespace {

std::vector<double> dyadic_values(const DyadicPoint& p) {
  std::vector<double> out(p.numerators.size());
  const double den = std::ldexp(1.0, p.denom_power);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<double>(p.numerators[i]) / den;
  return out;
}

DyadicPoint dyadic_sum(const DyadicPoint& a, const DyadicPoint& b) {
  const int k = std::max(a.denom_power, b.denom_power);
  DyadicPoint out;
  out.denom_power = k;
  out.numerators.resize(std::max(a.numerators.size(), b.numerators.size()), 0);
  for (std::size_t i = 0; i < out.numerators.size(); ++i) {
    std::int64_t v = 0;
    if (i < a.numerators.size()) v += a.numerators[i] << (k - a.denom_power);
    if (i < b.numerators.size()) v += b.numerators[i] << (k - b.denom_power);
    out.numerators[i] = v;
  }
  return out;
}

}  // namespace

DefectReport lift_quasilinearity(const RadialLift& lift,
                                 std::span<const std::pair<DyadicPoint, DyadicPoint>> pairs, NormKind norm,
                                 LiftPolicy policy) {
  DefectReport report;
  report.kind = DefectKind::QuasiAdditive;
  report.test_set_size = pairs.size();
  double sup = -std::numeric_limits<double>::infinity();
  for (const auto& [x, y] : pairs) {
    const auto xv = dyadic_values(x);
    const auto yv = dyadic_values(y);
    const double denom = double_vector_norm(xv, norm) + double_vector_norm(yv, norm);
    if (denom == 0) continue;
    const DyadicPoint sum = dyadic_sum(x, y);
    const double fx = lift.evaluate(x.numerators, x.denom_power, policy).value;
    const double fy = lift.evaluate(y.numerators, y.denom_power, policy).value;
    const double fxy = lift.evaluate(sum.numerators, sum.denom_power, policy).value;
    const double e = std::fabs(fxy - fx - fy) / denom;
    if (e > sup) {
      sup = e;
      report.sparse_pair_witness = {SparseVector::from_dense(xv), SparseVector::from_dense(yv)};
    }
  }
  report.value = report.sparse_pair_witness ? std::max(0.0, sup) : 0.0;
  return report;
}

std::vector<std::pair<DyadicPoint, DyadicPoint>> ray_closed_pairs_recentered(const GridDomain& domain,
                                                                             const RadialLift& lift,
                                                                             std::size_t center_id,
                                                                             std::size_t cap) {
  const std::size_t n = domain.size();
  const int k = domain.denom_power();
  const auto center = domain.point(center_id);
  std::vector<std::pair<DyadicPoint, DyadicPoint>> out;
  std::vector<std::int64_t> a(domain.dim()), b(domain.dim()), sum(domain.dim());
  for (std::size_t i = 0; i < n; ++i) {
    const auto pi = domain.point(i);
    for (int c = 0; c < domain.dim(); ++c) a[c] = pi[c] - center[c];
    for (std::size_t j = i; j < n; ++j) {
      const auto pj = domain.point(j);
      for (int c = 0; c < domain.dim(); ++c) {
        b[c] = pj[c] - center[c];
        sum[c] = a[c] + b[c];
      }
      bool usable = true;
      try {
        lift.evaluate(sum, k);
      } catch (const EvaluationError&) {
        usable = false;
      }
      if (!usable) continue;
      out.push_back({DyadicPoint{a, k}, DyadicPoint{b, k}});
      if (out.size() > cap) throw SizeLimitError("ray pair sample exceeds cap " + std::to_string(cap));
    }
  }
  return out;
}

std::vector<std::pair<DyadicPoint, DyadicPoint>> ray_closed_pairs(const GridDomain& domain,
                                                                  const RadialLift& lift,
                                                                  std::size_t cap) {
  const std::vector<std::int64_t> origin(domain.dim(), 0);
  const std::size_t center_id = domain.find(origin);
  if (center_id == GridDomain::npos) throw PreconditionError("grid does not contain the origin");
  return ray_closed_pairs_recentered(domain, lift, center_id, cap);
}

StabilityBounds stability_bound_report(const StabilityBudget& budget) {
  if (!(budget.r0 > 0) || !(budget.R0 >= budget.r0)) throw ParameterError("need 0 < r0 <= R0");
  if (!(budget.M > 0)) throw ParameterError("K-space constant must be positive");
  StabilityBounds out;
  out.affine_bound = (6.0 * budget.M * budget.R0 / budget.r0 + 2.0) * budget.epsilon;
  if (budget.delta) {
    if (!(*budget.delta > 0)) throw ParameterError("delta must be positive");
    out.jensen_bound = (4.0 + budget.R0 / *budget.delta) * budget.epsilon;
  }
  out.jensen_from_affine_bound = 2.0 * out.affine_bound;
  return out;
}

double jensen_stability_bound(const StabilityBudget& budget) {
  if (!budget.delta) throw ParameterError("Jensen bound requested but delta was not supplied");
  return *stability_bound_report(budget).jensen_bound;
}

RecoveryReport recovery_from_lift(const SampledFunction& f, const RadialLift& lift,
                                  std::size_t center_id, double M_assumed, double epsilon,
                                  const LpOptions& options) {
  const GridDomain& domain = f.domain();
  const auto center = domain.point(center_id);
  const int dim = domain.dim();

  RecoveryReport report;
  report.M = M_assumed;
  report.epsilon = epsilon;
  report.r0 = lift.min_exit_radius();
  report.R0 = lift.max_exit_radius();
  report.per_line_max_error = lift.max_fit_error();
  report.per_line_max_drop_error = lift.max_drop_error();

  const auto pairs = ray_closed_pairs_recentered(domain, lift, center_id);
  report.measured_Q = lift_quasilinearity(lift, pairs, lift.norm()).value;

  // Chebyshev linear fit to the lift over every ray sample.
  LinearProgram lp;
  lp.sense = Sense::Minimize;
  lp.objective.assign(dim + 1, 0.0);
  lp.objective[dim] = 1.0;
  lp.bounds.resize(dim + 1);
  lp.bounds[dim].lower = 0.0;
  for (const auto& fl : lift.lines()) {
    for (std::int64_t j = fl.line.j_min; j <= fl.line.j_max; ++j) {
      const double t = fl.line.t_at(j);
      const double target = fl.slope * t;
      LinearProgram::Constraint below, above;
      below.coeffs.assign(dim + 1, 0.0);
      above.coeffs.assign(dim + 1, 0.0);
      for (int c = 0; c < dim; ++c) {
        below.coeffs[c] = t * fl.line.unit[c];
        above.coeffs[c] = -t * fl.line.unit[c];
      }
      below.coeffs[dim] = -1.0;
      above.coeffs[dim] = -1.0;
      below.rel = above.rel = Relation::LessEq;
      below.rhs = target;
      above.rhs = -target;
      lp.constraints.push_back(std::move(below));
      lp.constraints.push_back(std::move(above));
    }
  }
  const LpSolution sol = solve_lp(lp, options);
  if (sol.status != LpStatus::Optimal) throw SolverError("linear fit LP did not solve");

  // Restore the best constant against f itself (coordinates shifted by the
  // lift center).
  const double den = std::ldexp(1.0, domain.denom_power());
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto p = domain.point(i);
    double ax = 0;
    for (int c = 0; c < dim; ++c) ax += sol.primal[c] * static_cast<double>(p[c] - center[c]) / den;
    const double r = f[i] - ax;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  report.affine_coeffs.assign(sol.primal.begin(), sol.primal.begin() + dim);
  report.affine_coeffs.push_back(0.5 * (lo + hi));
  report.measured_d = 0.5 * (hi - lo);
  report.theoretical_bound = (6.0 * M_assumed * report.R0 / report.r0 + 2.0) * report.epsilon;
  return report;
}

RecoveryReport affine_recovery_experiment(const SampledFunction& f, double M_assumed, int t_power,
                                          const LpOptions& options) {
  const GridDomain& domain = f.domain();
  NormKind norm;
  switch (domain.body_kind()) {
    case BodyKind::Cube:
    case BodyKind::BallSup:
    case BodyKind::PositiveConeSection: norm = NormKind::Sup; break;
    case BodyKind::BallEuclid: norm = NormKind::L2; break;
    case BodyKind::Simplex:
      throw PreconditionError("simplex is not star-shaped around the origin; recenter it first");
    default: throw ParameterError("unknown body kind");
  }

  const double epsilon = affinity_defect(f, enumerate_convex_triples(f.domain_ptr(), t_power)).value;
  const RadialLift lift = radial_affine_lift(lines_from_grid(f, norm), norm, options);
  const std::vector<std::int64_t> origin(domain.dim(), 0);
  const std::size_t center_id = domain.find(origin);
  if (center_id == GridDomain::npos) throw PreconditionError("grid does not contain the origin");
  return recovery_from_lift(f, lift, center_id, M_assumed, epsilon, options);
}

std::string StabilityBounds::to_json() const {
  nlohmann::json j;
  j["affine_bound"] = affine_bound;
  if (jensen_bound) j["jensen_bound"] = *jensen_bound;
  j["jensen_from_affine_bound"] = jensen_from_affine_bound;
  return j.dump();
}

std::string RecoveryReport::to_json() const {
  nlohmann::json j;
  j["epsilon"] = epsilon;
  j["r0"] = r0;
  j["R0"] = R0;
  j["M"] = M;
  j["per_line_max_error"] = per_line_max_error;
  j["per_line_max_drop_error"] = per_line_max_drop_error;
  j["measured_Q"] = measured_Q;
  j["measured_d"] = measured_d;
  j["theoretical_bound"] = theoretical_bound;
  j["affine_coeffs"] = affine_coeffs;
  return j.dump();
}

}  // namespace convlab
