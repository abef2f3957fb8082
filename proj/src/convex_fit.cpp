#include "convlab/convex_fit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "convlab/errors.hpp"
#include "convlab/rational.hpp"

namespace convlab {

namespace {

/// Supporting-hyperplane LP for co f at one point. `shift` keeps every rhs
/// nonnegative so the slack basis is feasible and phase one is skipped.
double minorant_at(const GridDomain& domain, std::span<const double> shifted_values, std::size_t point_id,
                   const LpOptions& options) {
  const int dim = domain.dim();
  LinearProgram lp;
  lp.sense = Sense::Maximize;
  lp.objective.resize(dim + 1);
  const auto x = domain.point_values(point_id);
  for (int j = 0; j < dim; ++j) lp.objective[j] = x[j];
  lp.objective[dim] = 1.0;
  lp.constraints.reserve(domain.size());
  for (std::size_t i = 0; i < domain.size(); ++i) {
    LinearProgram::Constraint row;
    row.coeffs.resize(dim + 1);
    const auto xi = domain.point_values(i);
    for (int j = 0; j < dim; ++j) row.coeffs[j] = xi[j];
    row.coeffs[dim] = 1.0;
    row.rel = Relation::LessEq;
    row.rhs = shifted_values[i];
    lp.constraints.push_back(std::move(row));
  }
  const LpSolution sol = solve_lp(lp, options);
  if (sol.status != LpStatus::Optimal) {
    throw SolverError("convex minorant LP did not solve to optimality");
  }
  return sol.objective_value;
}

}  // namespace

SampledFunction convex_minorant(const SampledFunction& f, const LpOptions& options, int threads) {
  const GridDomain& domain = f.domain();
  const std::size_t n = domain.size();
  double shift = f[0];
  for (std::size_t i = 1; i < n; ++i) shift = std::min(shift, f[i]);
  std::vector<double> shifted(f.values().begin(), f.values().end());
  for (double& v : shifted) v -= shift;

  std::vector<double> out(n);
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = minorant_at(domain, shifted, i, options) + shift;
  } else {
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        out[i] = minorant_at(domain, shifted, i, options) + shift;
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return SampledFunction(f.domain_ptr(), std::move(out));
}

ConvexDistanceResult distance_to_convex(const SampledFunction& f, const LpOptions& options, int threads) {
  SampledFunction minorant = convex_minorant(f, options, threads);
  double gap = 0;
  for (std::size_t i = 0; i < f.size(); ++i) gap = std::max(gap, f[i] - minorant[i]);
  const double d = 0.5 * gap;
  std::vector<double> g(minorant.values().begin(), minorant.values().end());
  for (double& v : g) v += d;
  return ConvexDistanceResult{d, SampledFunction(f.domain_ptr(), std::move(g)), std::move(minorant)};
}

namespace {

using RatMatrix = std::vector<std::vector<Rational>>;

/// Row echelon over the rationals; returns rank. Reduces rhs columns along.
int echelon(RatMatrix& m) {
  if (m.empty()) return 0;
  const std::size_t rows = m.size(), cols = m[0].size();
  int rank = 0;
  for (std::size_t col = 0; col < cols && static_cast<std::size_t>(rank) < rows; ++col) {
    std::size_t pivot = rank;
    while (pivot < rows && m[pivot][col] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[rank], m[pivot]);
    const Rational inv = m[rank][col];
    for (std::size_t j = col; j < cols; ++j) m[rank][j] /= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (static_cast<int>(i) == rank || m[i][col] == 0) continue;
      const Rational factor = m[i][col];
      for (std::size_t j = col; j < cols; ++j) m[i][j] -= factor * m[rank][j];
    }
    ++rank;
  }
  return rank;
}

}  // namespace

std::vector<ConvexityConstraint> grid_convexity_constraints(const GridDomain& domain, std::size_t cap) {
  const int dim = domain.dim();
  const std::size_t n = domain.size();
  const int max_subset = dim + 1;
  std::vector<ConvexityConstraint> out;

  // Subsets are enumerated in lexicographic order per size; for each
  // affinely independent subset, every grid point with strictly positive
  // barycentric weights yields one constraint.
  std::vector<std::size_t> subset;
  auto process_subset = [&]() {
    const int s = static_cast<int>(subset.size());
    // Affine system: coordinates plus the weights-sum-to-one row.
    RatMatrix a(dim + 1, std::vector<Rational>(s));
    std::vector<long long> lo(dim, std::numeric_limits<long long>::max());
    std::vector<long long> hi(dim, std::numeric_limits<long long>::min());
    for (int k = 0; k < s; ++k) {
      const auto p = domain.point(subset[k]);
      for (int j = 0; j < dim; ++j) {
        a[j][k] = Rational(p[j]);
        lo[j] = std::min<long long>(lo[j], p[j]);
        hi[j] = std::max<long long>(hi[j], p[j]);
      }
      a[dim][k] = 1;
    }
    {
      RatMatrix probe = a;
      if (echelon(probe) != s) return;  // affinely dependent; redundant by the basic-solution argument
    }
    for (std::size_t x = 0; x < n; ++x) {
      if (std::find(subset.begin(), subset.end(), x) != subset.end()) continue;
      const auto px = domain.point(x);
      bool inside_box = true;
      for (int j = 0; j < dim; ++j) {
        if (px[j] < lo[j] || px[j] > hi[j]) {
          inside_box = false;
          break;
        }
      }
      if (!inside_box) continue;
      RatMatrix sys(dim + 1, std::vector<Rational>(s + 1));
      for (int i = 0; i <= dim; ++i) {
        for (int k = 0; k < s; ++k) sys[i][k] = a[i][k];
        sys[i][s] = i < dim ? Rational(px[i]) : Rational(1);
      }
      if (echelon(sys) != s) continue;  // inconsistent: x outside the affine span
      // After full reduction row k reads t_k = sys[k][s].
      bool positive = true;
      std::vector<Rational> weights(s);
      for (int k = 0; k < s; ++k) {
        weights[k] = sys[k][s];
        if (weights[k] <= 0) {
          positive = false;
          break;
        }
      }
      if (!positive) continue;
      ConvexityConstraint c;
      c.point = x;
      c.support.assign(subset.begin(), subset.end());
      c.weights.resize(s);
      for (int k = 0; k < s; ++k) c.weights[k] = to_double(weights[k]);
      out.push_back(std::move(c));
      if (out.size() > cap) {
        throw SizeLimitError("convexity constraint list exceeds cap " + std::to_string(cap));
      }
    }
  };

  // All subsets of sizes 2..dim+1.
  auto recurse = [&](auto&& self, std::size_t start, int remaining) -> void {
    if (remaining == 0) {
      process_subset();
      return;
    }
    for (std::size_t i = start; i + remaining <= n; ++i) {
      subset.push_back(i);
      self(self, i + 1, remaining - 1);
      subset.pop_back();
    }
  };
  for (int size = 2; size <= std::min<int>(max_subset, static_cast<int>(n)); ++size) {
    recurse(recurse, 0, size);
  }
  return out;
}

double distance_to_convex_direct(const SampledFunction& f,
                                 std::span<const ConvexityConstraint> constraints,
                                 const LpOptions& options) {
  const std::size_t n = f.size();
  // Dual variables: one weight per convexity constraint, then a plus/minus
  // pair per grid point. Maximize sum_i f_i (y-_i - y+_i) subject to
  //   sum_i (y+_i + y-_i) = 1
  //   column balance at every grid point j:
  //     y+_j - y-_j + [conv rows touching j] = 0.
  const std::size_t vars = constraints.size() + 2 * n;
  auto yplus = [&](std::size_t i) { return constraints.size() + i; };
  auto yminus = [&](std::size_t i) { return constraints.size() + n + i; };

  LinearProgram lp;
  lp.sense = Sense::Maximize;
  lp.objective.assign(vars, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    lp.objective[yplus(i)] = -f[i];
    lp.objective[yminus(i)] = f[i];
  }
  lp.bounds.resize(vars);
  for (auto& b : lp.bounds) b.lower = 0.0;

  std::vector<LinearProgram::Constraint> balance(n);
  for (std::size_t j = 0; j < n; ++j) {
    balance[j].coeffs.assign(vars, 0.0);
    balance[j].coeffs[yplus(j)] = 1.0;
    balance[j].coeffs[yminus(j)] = -1.0;
    balance[j].rel = Relation::Equal;
    balance[j].rhs = 0.0;
  }
  for (std::size_t r = 0; r < constraints.size(); ++r) {
    const auto& c = constraints[r];
    balance[c.point].coeffs[r] += 1.0;
    for (std::size_t k = 0; k < c.support.size(); ++k) {
      balance[c.support[k]].coeffs[r] -= c.weights[k];
    }
  }
  LinearProgram::Constraint mass;
  mass.coeffs.assign(vars, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    mass.coeffs[yplus(i)] = 1.0;
    mass.coeffs[yminus(i)] = 1.0;
  }
  mass.rel = Relation::Equal;
  mass.rhs = 1.0;
  lp.constraints.reserve(n + 1);
  for (auto& row : balance) lp.constraints.push_back(std::move(row));
  lp.constraints.push_back(std::move(mass));

  const LpSolution sol = solve_lp(lp, options);
  if (sol.status != LpStatus::Optimal) {
    throw SolverError(std::string("direct convex-distance LP did not solve to optimality: ") +
                      (sol.status == LpStatus::Infeasible ? "infeasible" : "unbounded") +
                      " after " + std::to_string(sol.iterations) + " pivots");
  }
  return sol.objective_value;
}

AffineFitResult best_affine_fit(const SampledFunction& f, const LpOptions& options) {
  const GridDomain& domain = f.domain();
  const int dim = domain.dim();
  const std::size_t n = domain.size();
  if (n == 0) throw ParameterError("cannot fit an empty sample");
  // Variables: a_1..a_dim, b free; d >= 0.
  LinearProgram lp;
  lp.sense = Sense::Minimize;
  lp.objective.assign(dim + 2, 0.0);
  lp.objective[dim + 1] = 1.0;
  lp.bounds.resize(dim + 2);
  lp.bounds[dim + 1].lower = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = domain.point_values(i);
    LinearProgram::Constraint below, above;
    below.coeffs.assign(dim + 2, 0.0);
    above.coeffs.assign(dim + 2, 0.0);
    for (int j = 0; j < dim; ++j) {
      below.coeffs[j] = x[j];
      above.coeffs[j] = -x[j];
    }
    below.coeffs[dim] = 1.0;
    above.coeffs[dim] = -1.0;
    below.coeffs[dim + 1] = -1.0;
    above.coeffs[dim + 1] = -1.0;
    below.rel = above.rel = Relation::LessEq;
    below.rhs = f[i];
    above.rhs = -f[i];
    lp.constraints.push_back(std::move(below));
    lp.constraints.push_back(std::move(above));
  }
  const LpSolution sol = solve_lp(lp, options);
  if (sol.status != LpStatus::Optimal) throw SolverError("affine fit LP did not solve to optimality");
  AffineFitResult out;
  out.coeffs.assign(sol.primal.begin(), sol.primal.begin() + dim + 1);
  out.distance = sol.primal[dim + 1];
  return out;
}

LineFitResult best_affine_fit_1d(std::span<const double> ts, std::span<const double> values,
                                 const LpOptions& options) {
  if (ts.size() != values.size() || ts.empty()) throw ParameterError("bad 1-D sample");
  LinearProgram lp;
  lp.sense = Sense::Minimize;
  lp.objective = {0.0, 0.0, 1.0};  // slope, intercept, d
  lp.bounds.resize(3);
  lp.bounds[2].lower = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    lp.constraints.push_back({{ts[i], 1.0, -1.0}, Relation::LessEq, values[i]});
    lp.constraints.push_back({{-ts[i], -1.0, -1.0}, Relation::LessEq, -values[i]});
  }
  const LpSolution sol = solve_lp(lp, options);
  if (sol.status != LpStatus::Optimal) throw SolverError("1-D affine fit LP did not solve to optimality");
  return LineFitResult{sol.primal[0], sol.primal[1], sol.primal[2]};
}

JensenFitResult best_jensen_fit(const SampledFunction& f, const LpOptions& options) {
  return best_jensen_fit(f, enumerate_midpoint_pairs(f.domain_ptr()), options);
}

JensenFitResult best_jensen_fit(const SampledFunction& f, const MidpointSet& pairs,
                                const LpOptions& options) {
  if (f.domain_ptr() != pairs.domain) {
    throw DomainMismatchError("midpoint pairs belong to a different domain");
  }
  const std::size_t n = f.size();
  bool any_pair = false;

  LinearProgram lp;
  lp.sense = Sense::Minimize;
  lp.objective.assign(n + 1, 0.0);
  lp.objective[n] = 1.0;
  lp.bounds.resize(n + 1);
  lp.bounds[n].lower = 0.0;
  // Midpoint identities, deduplicated across pair orientation.
  std::vector<bool> seen(n * n, false);
  for (const auto& pair : pairs.pairs) {
    if (pair.x_id == pair.y_id) continue;
    const std::size_t a = std::min(pair.x_id, pair.y_id);
    const std::size_t b = std::max(pair.x_id, pair.y_id);
    if (seen[a * n + b]) continue;
    seen[a * n + b] = true;
    any_pair = true;
    LinearProgram::Constraint row;
    row.coeffs.assign(n + 1, 0.0);
    row.coeffs[pair.mid_id] += 1.0;
    row.coeffs[a] -= 0.5;
    row.coeffs[b] -= 0.5;
    row.rel = Relation::Equal;
    row.rhs = 0.0;
    lp.constraints.push_back(std::move(row));
  }
  if (!any_pair) throw PreconditionError("grid has no nondegenerate midpoint pair");
  for (std::size_t i = 0; i < n; ++i) {
    LinearProgram::Constraint below, above;
    below.coeffs.assign(n + 1, 0.0);
    below.coeffs[i] = 1.0;
    below.coeffs[n] = -1.0;
    below.rel = Relation::LessEq;
    below.rhs = f[i];
    lp.constraints.push_back(std::move(below));
    above.coeffs.assign(n + 1, 0.0);
    above.coeffs[i] = -1.0;
    above.coeffs[n] = -1.0;
    above.rel = Relation::LessEq;
    above.rhs = -f[i];
    lp.constraints.push_back(std::move(above));
  }
  const LpSolution sol = solve_lp(lp, options);
  if (sol.status != LpStatus::Optimal) throw SolverError("Jensen fit LP did not solve to optimality");
  std::vector<double> g(sol.primal.begin(), sol.primal.begin() + static_cast<long>(n));
  return JensenFitResult{SampledFunction(f.domain_ptr(), std::move(g)), sol.primal[n]};
}

}  // namespace convlab
