#pragma once

#include <optional>
#include <string>
#include <vector>

namespace convlab {

enum class Sense { Minimize, Maximize };
enum class Relation { LessEq, Equal, GreaterEq };

/// Dense LP in row form: optimize c'x subject to per-row relations and
/// optional per-variable bounds. Variables with no bounds entry are free.
struct LinearProgram {
  struct Constraint {
    std::vector<double> coeffs;
    Relation rel = Relation::LessEq;
    double rhs = 0;
  };
  struct Bounds {
    std::optional<double> lower;
    std::optional<double> upper;
  };

  Sense sense = Sense::Minimize;
  std::vector<double> objective;
  std::vector<Constraint> constraints;
  std::vector<Bounds> bounds;  // empty, or one entry per variable

  std::size_t num_vars() const { return objective.size(); }

  std::string to_json() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Optimal;
  double objective_value = 0;
  std::vector<double> primal;
  long iterations = 0;

  std::string to_json() const;
};

struct LpOptions {
  double eps = 1e-9;         // pivot / feasibility tolerance
  long dantzig_pivots = -1;  // pivots before switching to Bland's rule; -1 = auto
  long max_iterations = 1'000'000;
};

/// Two-phase dense dictionary simplex. Deterministic: Dantzig pivoting with
/// index tie-breaks, falling back to Bland's rule after a bounded number of
/// pivots so degenerate programs cannot cycle.
LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options = {});

/// Largest violation of the program's constraints and bounds at x.
double lp_max_violation(const LinearProgram& lp, const std::vector<double>& x);

}  // namespace convlab
