#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace utat::lp {

enum class Relation { le, eq, ge };
enum class Sense { minimize, maximize };

/// Dense linear program over named non-negative variables with optional
/// upper bounds.  Sized for the small programs this project generates
/// (tens of variables, tens of constraints) that are solved thousands of
/// times per simulation.
struct LinearProgram {
  struct Variable {
    std::string name;
    std::optional<double> upper;  ///< x <= upper when set; lower bound is always 0
  };
  struct Constraint {
    std::vector<std::pair<int, double>> terms;  ///< (variable index, coefficient)
    Relation rel = Relation::le;
    double rhs = 0.0;
    std::string name;
  };

  Sense sense = Sense::minimize;
  std::vector<Variable> vars;
  std::vector<double> objective;  ///< one coefficient per variable
  std::vector<Constraint> constraints;

  /// Declares a variable, returns its index.
  int add_variable(std::string name, std::optional<double> upper = std::nullopt);

  /// Replaces the objective (coefficient vector must cover all variables).
  void set_objective(Sense s, std::vector<double> coefficients);

  void add_constraint(std::vector<std::pair<int, double>> terms, Relation rel, double rhs,
                      std::string name = {});

  /// Index of a named variable, or -1 when absent.
  int variable_index(const std::string& name) const;
};

enum class SolveStatus { optimal, infeasible, unbounded, numerical_failure };

struct LpSolution {
  SolveStatus status = SolveStatus::numerical_failure;
  double objective = 0.0;
  std::vector<double> values;  ///< one per declared variable; empty unless optimal
};

/// Two-phase dense simplex with Bland's anti-cycling rule (smallest-index
/// tie-breaking).  Equalities and >= rows get phase-one artificial variables;
/// upper bounds are materialized as rows.  Deterministic: identical input
/// bytes produce identical output bytes.  Numerical breakdown is reported as
/// SolveStatus::numerical_failure, never as an exception.
LpSolution solve(const LinearProgram& lp);

struct FeasibilityReport {
  bool feasible = false;
  double max_residual = 0.0;  ///< worst raw constraint/bound violation
  std::string worst;          ///< name of the worst row or bound, "" when clean
};

/// Checks an assignment (one value per declared variable) against every
/// constraint and bound at 1e-9 scaled tolerance; reports the worst raw
/// violation.
FeasibilityReport check_feasible(const LinearProgram& lp, const std::vector<double>& assignment);

/// Name-keyed variant; unspecified variables default to 0.  Unknown names
/// raise an error.
FeasibilityReport check_feasible(const LinearProgram& lp,
                                 const std::map<std::string, double>& assignment);

/// Human-readable listing of the program.  With `positional_names` the
/// variables print as x1..xN and rows as r1..rM, which makes listings of
/// structurally identical programs byte-comparable regardless of naming.
std::string dump(const LinearProgram& lp, bool positional_names = false);

}  // namespace utat::lp
