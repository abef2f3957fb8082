#include "convlab/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <nlohmann/json.hpp>

#include "convlab/errors.hpp"

namespace convlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dictionary simplex on the canonical problem max c'x, Ax <= b, x >= 0.
/// Column n holds the phase-1 artificial variable, column n+1 the rhs.
/// Row m is the true objective, row m+1 the artificial one.
class Dictionary {
 public:
  Dictionary(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
             const std::vector<double>& c, const LpOptions& opt)
      : m_(static_cast<int>(b.size())),
        n_(static_cast<int>(c.size())),
        opt_(opt),
        nonbasic_(n_ + 1),
        basic_(m_),
        D_(m_ + 2, std::vector<double>(n_ + 2, 0.0)) {
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) D_[i][j] = A[i][j];
      basic_[i] = n_ + i;
      D_[i][n_] = -1;
      D_[i][n_ + 1] = b[i];
    }
    for (int j = 0; j < n_; ++j) {
      nonbasic_[j] = j;
      D_[m_][j] = -c[j];
    }
    nonbasic_[n_] = -1;
    D_[m_ + 1][n_] = 1;
  }

  long iterations() const { return iterations_; }

  /// Returns the status; on Optimal fills x (canonical coordinates) and obj.
  LpStatus run(std::vector<double>& x, double& obj) {
    if (m_ > 0) {
      int r = 0;
      for (int i = 1; i < m_; ++i) {
        if (D_[i][n_ + 1] < D_[r][n_ + 1]) r = i;
      }
      if (D_[r][n_ + 1] < -opt_.eps) {
        pivot(r, n_);
        if (!improve(m_ + 1) || D_[m_ + 1][n_ + 1] < -opt_.eps) return LpStatus::Infeasible;
        for (int i = 0; i < m_; ++i) {
          if (basic_[i] != -1) continue;
          // Artificial variable basic at zero; pivot it out on any usable column.
          int s = 0;
          for (int j = 1; j <= n_; ++j) {
            if (std::pair(D_[i][j], nonbasic_[j]) < std::pair(D_[i][s], nonbasic_[s])) s = j;
          }
          pivot(i, s);
        }
      }
    }
    if (!improve(m_)) return LpStatus::Unbounded;
    x.assign(n_, 0.0);
    for (int i = 0; i < m_; ++i) {
      if (basic_[i] < n_) x[basic_[i]] = D_[i][n_ + 1];
    }
    obj = D_[m_][n_ + 1];
    return LpStatus::Optimal;
  }

 private:
  void pivot(int r, int s) {
    ++iterations_;
    double* a = D_[r].data();
    const double inv = 1.0 / a[s];
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r || std::fabs(D_[i][s]) <= 1e-14) continue;
      double* row = D_[i].data();
      const double factor = row[s] * inv;
      for (int j = 0; j < n_ + 2; ++j) row[j] -= a[j] * factor;
      row[s] = a[s] * factor;
    }
    for (int j = 0; j < n_ + 2; ++j) {
      if (j != s) D_[r][j] *= inv;
    }
    for (int i = 0; i < m_ + 2; ++i) {
      if (i != r) D_[i][s] *= -inv;
    }
    D_[r][s] = inv;
    std::swap(basic_[r], nonbasic_[s]);
  }

  /// Runs pivots against objective row `obj_row` until optimal (true) or
  /// unbounded (false). Uses Dantzig's rule with index tie-breaks, then
  /// Bland's rule once the pivot budget is spent.
  bool improve(int obj_row) {
    const long dantzig_budget =
        opt_.dantzig_pivots >= 0 ? opt_.dantzig_pivots : 200 + 10L * (m_ + n_);
    const int skip_id = obj_row == m_ + 1 ? -2 : -1;  // phase 2 may not re-enter the artificial
    for (;;) {
      if (iterations_ > opt_.max_iterations) {
        throw SolverError("simplex iteration cap " + std::to_string(opt_.max_iterations) +
                          " exceeded (cycling guard)");
      }
      const bool bland = iterations_ >= dantzig_budget;
      int s = -1;
      for (int j = 0; j <= n_; ++j) {
        if (nonbasic_[j] == skip_id) continue;
        if (D_[obj_row][j] < -opt_.eps) {
          if (s == -1) {
            s = j;
          } else if (bland) {
            if (nonbasic_[j] < nonbasic_[s]) s = j;
          } else if (std::pair(D_[obj_row][j], nonbasic_[j]) < std::pair(D_[obj_row][s], nonbasic_[s])) {
            s = j;
          }
        }
      }
      if (s == -1) return true;
      int r = -1;
      double best_ratio = kInf;
      for (int i = 0; i < m_; ++i) {
        if (D_[i][s] <= opt_.eps) continue;
        const double ratio = D_[i][n_ + 1] / D_[i][s];
        if (r == -1) {
          r = i;
          best_ratio = ratio;
          continue;
        }
        const double tie = 1e-12 * std::max(1.0, std::fabs(best_ratio));
        if (ratio < best_ratio - tie) {
          r = i;
          best_ratio = ratio;
        } else if (ratio < best_ratio + tie) {
          // Within the tie zone: Bland's rule breaks by index (termination),
          // Dantzig mode by the larger pivot element (conditioning).
          const bool take = bland ? basic_[i] < basic_[r] : D_[i][s] > D_[r][s];
          if (take) {
            r = i;
            best_ratio = std::min(best_ratio, ratio);
          }
        }
      }
      if (r == -1) {
        // No blocking row. A reduced cost at noise level is an optimality
        // gap, not an unbounded ray.
        if (std::fabs(D_[obj_row][s]) <= 1e-7 * (1.0 + std::fabs(D_[obj_row][n_ + 1]))) return true;
        return false;
      }
      pivot(r, s);
    }
  }

  int m_, n_;
  LpOptions opt_;
  long iterations_ = 0;
  std::vector<int> nonbasic_, basic_;
  std::vector<std::vector<double>> D_;
};

struct VarMap {
  // x_original = offset + sign * x_plus [- x_minus when split]
  double offset = 0;
  double sign = 1;
  int plus_col = -1;
  int minus_col = -1;  // >= 0 only for free variables
};

void validate(const LinearProgram& lp) {
  const std::size_t n = lp.num_vars();
  if (n == 0) throw ParameterError("LP has no variables");
  for (double c : lp.objective) {
    if (!std::isfinite(c)) throw ParameterError("non-finite objective coefficient");
  }
  for (const auto& row : lp.constraints) {
    if (row.coeffs.size() != n) throw ParameterError("constraint arity does not match variable count");
    for (double a : row.coeffs) {
      if (!std::isfinite(a)) throw ParameterError("non-finite constraint coefficient");
    }
    if (!std::isfinite(row.rhs)) throw ParameterError("non-finite rhs");
  }
  if (!lp.bounds.empty() && lp.bounds.size() != n) {
    throw ParameterError("bounds arity does not match variable count");
  }
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options) {
  validate(lp);
  const std::size_t n_orig = lp.num_vars();

  // Canonicalize: maximize, x >= 0 via shifts/splits, rows as <=.
  std::vector<VarMap> vmap(n_orig);
  int n = 0;
  std::vector<std::pair<int, double>> upper_rows;  // (canonical column, span) from two-sided bounds
  for (std::size_t j = 0; j < n_orig; ++j) {
    const LinearProgram::Bounds b = lp.bounds.empty() ? LinearProgram::Bounds{} : lp.bounds[j];
    if (b.lower && b.upper && *b.upper < *b.lower) {
      return LpSolution{LpStatus::Infeasible, 0, {}, 0};
    }
    VarMap& v = vmap[j];
    if (b.lower) {
      v.offset = *b.lower;
      v.sign = 1;
      v.plus_col = n++;
      if (b.upper) upper_rows.emplace_back(v.plus_col, *b.upper - *b.lower);
    } else if (b.upper) {
      v.offset = *b.upper;
      v.sign = -1;
      v.plus_col = n++;
    } else {
      v.plus_col = n++;
      v.minus_col = n++;
    }
  }

  std::vector<std::vector<double>> A;
  std::vector<double> b;
  auto add_row = [&](const std::vector<double>& coeffs, double rhs, double row_sign) {
    std::vector<double> row(n, 0.0);
    double adj = rhs;
    for (std::size_t j = 0; j < n_orig; ++j) {
      const double a = row_sign * coeffs[j];
      if (a == 0) continue;
      const VarMap& v = vmap[j];
      row[v.plus_col] += a * v.sign;
      if (v.minus_col >= 0) row[v.minus_col] -= a;
      adj -= a * v.offset;
    }
    A.push_back(std::move(row));
    b.push_back(adj);
  };
  for (const auto& row : lp.constraints) {
    if (row.rel == Relation::LessEq || row.rel == Relation::Equal) add_row(row.coeffs, row.rhs, 1.0);
    if (row.rel == Relation::GreaterEq || row.rel == Relation::Equal) add_row(row.coeffs, -row.rhs, -1.0);
  }
  for (const auto& [col, span] : upper_rows) {
    std::vector<double> row(n, 0.0);
    row[col] = 1.0;
    A.push_back(std::move(row));
    b.push_back(span);
  }

  std::vector<double> c(n, 0.0);
  const double obj_sign = lp.sense == Sense::Maximize ? 1.0 : -1.0;
  for (std::size_t j = 0; j < n_orig; ++j) {
    const double a = obj_sign * lp.objective[j];
    const VarMap& v = vmap[j];
    c[v.plus_col] += a * v.sign;
    if (v.minus_col >= 0) c[v.minus_col] -= a;
  }

  Dictionary dict(A, b, c, options);
  std::vector<double> xc;
  double canonical_obj = 0;
  LpSolution out;
  out.status = dict.run(xc, canonical_obj);
  out.iterations = dict.iterations();
  if (out.status != LpStatus::Optimal) return out;

  out.primal.resize(n_orig);
  for (std::size_t j = 0; j < n_orig; ++j) {
    const VarMap& v = vmap[j];
    double val = v.offset + v.sign * xc[v.plus_col];
    if (v.minus_col >= 0) val -= xc[v.minus_col];
    out.primal[j] = val;
  }
  double obj = 0;
  for (std::size_t j = 0; j < n_orig; ++j) obj += lp.objective[j] * out.primal[j];
  out.objective_value = obj;
  return out;
}

double lp_max_violation(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0;
  for (const auto& row : lp.constraints) {
    double lhs = 0;
    for (std::size_t j = 0; j < x.size(); ++j) lhs += row.coeffs[j] * x[j];
    switch (row.rel) {
      case Relation::LessEq: worst = std::max(worst, lhs - row.rhs); break;
      case Relation::GreaterEq: worst = std::max(worst, row.rhs - lhs); break;
      case Relation::Equal: worst = std::max(worst, std::fabs(lhs - row.rhs)); break;
    }
  }
  if (!lp.bounds.empty()) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (lp.bounds[j].lower) worst = std::max(worst, *lp.bounds[j].lower - x[j]);
      if (lp.bounds[j].upper) worst = std::max(worst, x[j] - *lp.bounds[j].upper);
    }
  }
  return worst;
}

std::string LinearProgram::to_json() const {
  nlohmann::json j;
  j["sense"] = sense == Sense::Minimize ? "min" : "max";
  j["objective"] = objective;
  auto rows = nlohmann::json::array();
  for (const auto& row : constraints) {
    const char* rel = row.rel == Relation::LessEq ? "<=" : row.rel == Relation::Equal ? "=" : ">=";
    rows.push_back({{"coeffs", row.coeffs}, {"rel", rel}, {"rhs", row.rhs}});
  }
  j["constraints"] = rows;
  auto bnds = nlohmann::json::array();
  for (const auto& b : bounds) {
    nlohmann::json jb;
    if (b.lower) jb["lower"] = *b.lower;
    if (b.upper) jb["upper"] = *b.upper;
    bnds.push_back(jb);
  }
  j["bounds"] = bnds;
  return j.dump();
}

std::string LpSolution::to_json() const {
  nlohmann::json j;
  j["status"] = status == LpStatus::Optimal ? "optimal"
                : status == LpStatus::Infeasible ? "infeasible"
                                                 : "unbounded";
  j["objective_value"] = objective_value;
  j["primal"] = primal;
  j["iterations"] = iterations;
  return j.dump();
}

}  // namespace convlab
