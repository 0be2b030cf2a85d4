#include "utat/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "utat/errors.hpp"

namespace utat::lp {

int LinearProgram::add_variable(std::string name, std::optional<double> upper) {
  vars.push_back({std::move(name), upper});
  objective.push_back(0.0);
  return static_cast<int>(vars.size()) - 1;
}

void LinearProgram::set_objective(Sense s, std::vector<double> coefficients) {
  if (coefficients.size() != vars.size()) {
    throw Error("validation-error", "objective must cover all variables", 2);
  }
  sense = s;
  objective = std::move(coefficients);
}

void LinearProgram::add_constraint(std::vector<std::pair<int, double>> terms, Relation rel,
                                   double rhs, std::string name) {
  for (const auto& [idx, coef] : terms) {
    if (idx < 0 || idx >= static_cast<int>(vars.size())) {
      throw Error("validation-error", "constraint references undeclared variable", 2);
    }
    if (!std::isfinite(coef)) {
      throw Error("validation-error", "non-finite constraint coefficient", 2);
    }
  }
  if (!std::isfinite(rhs)) throw Error("validation-error", "non-finite right-hand side", 2);
  constraints.push_back({std::move(terms), rel, rhs, std::move(name)});
}

int LinearProgram::variable_index(const std::string& name) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i].name == name) return static_cast<int>(i);
  return -1;
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kOptTol = 1e-9;
constexpr double kTieTol = 1e-9;

struct Row {
  std::vector<double> a;  // dense coefficients over structural variables
  Relation rel;
  double b;
};

// Materializes constraints plus upper-bound rows over the structural
// variables, with every right-hand side normalized to b >= 0.
std::vector<Row> materialize(const LinearProgram& lp) {
  const int n = static_cast<int>(lp.vars.size());
  std::vector<Row> rows;
  rows.reserve(lp.constraints.size() + lp.vars.size());
  for (const auto& c : lp.constraints) {
    Row row{std::vector<double>(n, 0.0), c.rel, c.rhs};
    for (const auto& [idx, coef] : c.terms) row.a[idx] += coef;
    rows.push_back(std::move(row));
  }
  for (int i = 0; i < n; ++i) {
    if (lp.vars[i].upper) {
      Row row{std::vector<double>(n, 0.0), Relation::le, *lp.vars[i].upper};
      row.a[i] = 1.0;
      rows.push_back(std::move(row));
    }
  }
  for (auto& row : rows) {
    if (row.b < 0.0) {
      for (double& v : row.a) v = -v;
      row.b = -row.b;
      if (row.rel == Relation::le) {
        row.rel = Relation::ge;
      } else if (row.rel == Relation::ge) {
        row.rel = Relation::le;
      }
    }
  }
  return rows;
}

struct Tableau {
  int ncols = 0;                          // structural + slack + artificial
  std::vector<std::vector<double>> body;  // one vector per row, length ncols
  std::vector<double> rhs;
  std::vector<int> basis;      // basic column per row
  std::vector<bool> barred;    // columns banned from entering (artificials)
  std::vector<double> cost;    // reduced-cost row, length ncols
  int art_begin = 0;
};

// One Gauss-Jordan pivot on (row, col), including the cost row.
void pivot(Tableau& t, int row, int col) {
  auto& pr = t.body[row];
  const double piv = pr[col];
  const double inv = 1.0 / piv;
  for (double& v : pr) v *= inv;
  pr[col] = 1.0;  // exact
  t.rhs[row] *= inv;
  for (std::size_t i = 0; i < t.body.size(); ++i) {
    if (static_cast<int>(i) == row) continue;
    const double f = t.body[i][col];
    if (f == 0.0) continue;
    auto& ri = t.body[i];
    for (int j2 = 0; j2 < t.ncols; ++j2) ri[j2] -= f * pr[j2];
    ri[col] = 0.0;  // exact
    t.rhs[i] -= f * t.rhs[row];
    if (t.rhs[i] < 0.0 && t.rhs[i] > -1e-11) t.rhs[i] = 0.0;
  }
  const double fc = t.cost[col];
  if (fc != 0.0) {
    for (int j2 = 0; j2 < t.ncols; ++j2) t.cost[j2] -= fc * pr[j2];
    t.cost[col] = 0.0;
  }
  t.basis[row] = col;
}

enum class LoopResult { optimal, unbounded, stalled };

// Minimizing simplex loop under Bland's rule: entering column is the
// smallest-index negative reduced cost, leaving row breaks min-ratio ties by
// the smallest basic variable index.
LoopResult iterate(Tableau& t, long max_iters) {
  for (long iter = 0; iter < max_iters; ++iter) {
    int enter = -1;
    for (int j = 0; j < t.ncols; ++j) {
      if (!t.barred[j] && t.cost[j] < -kOptTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return LoopResult::optimal;

    int leave = -1;
    double best = 0.0;
    for (std::size_t i = 0; i < t.body.size(); ++i) {
      const double a = t.body[i][enter];
      if (a > kPivotTol) {
        const double ratio = t.rhs[i] / a;
        if (leave < 0 || ratio < best - kTieTol ||
            (ratio <= best + kTieTol && t.basis[i] < t.basis[leave])) {
          leave = static_cast<int>(i);
          best = ratio;
        }
      }
    }
    if (leave < 0) return LoopResult::unbounded;
    if (!std::isfinite(t.body[leave][enter])) return LoopResult::stalled;
    pivot(t, leave, enter);
  }
  return LoopResult::stalled;
}

}  // namespace

LpSolution solve(const LinearProgram& lp) {
  LpSolution out;
  const int n = static_cast<int>(lp.vars.size());
  if (lp.objective.size() != lp.vars.size()) {
    out.status = SolveStatus::numerical_failure;
    return out;
  }

  std::vector<Row> rows = materialize(lp);
  const int m = static_cast<int>(rows.size());

  // Column plan: structural, then one slack per inequality, then one
  // artificial per = / >= row.
  int nslack = 0, nart = 0;
  for (const auto& r : rows) {
    if (r.rel != Relation::eq) ++nslack;
    if (r.rel != Relation::le) ++nart;
  }
  Tableau t;
  t.ncols = n + nslack + nart;
  t.art_begin = n + nslack;
  t.body.assign(m, std::vector<double>(t.ncols, 0.0));
  t.rhs.resize(m);
  t.basis.assign(m, -1);
  t.barred.assign(t.ncols, false);
  t.cost.assign(t.ncols, 0.0);

  double b_max = 1.0;
  {
    int slack = n, art = t.art_begin;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) t.body[i][j] = rows[i].a[j];
      t.rhs[i] = rows[i].b;
      b_max = std::max(b_max, rows[i].b);
      switch (rows[i].rel) {
        case Relation::le:
          t.body[i][slack] = 1.0;
          t.basis[i] = slack++;
          break;
        case Relation::ge:
          t.body[i][slack] = -1.0;
          ++slack;
          t.body[i][art] = 1.0;
          t.basis[i] = art++;
          break;
        case Relation::eq:
          t.body[i][art] = 1.0;
          t.basis[i] = art++;
          break;
      }
    }
  }

  const long max_iters = 5000 + 200L * (m + t.ncols);

  // Phase one: minimize the sum of artificials.  Reduced costs start as
  // -sum of the artificial-basic rows.
  if (nart > 0) {
    for (int i = 0; i < m; ++i) {
      if (t.basis[i] >= t.art_begin) {
        for (int j = 0; j < t.ncols; ++j) t.cost[j] -= t.body[i][j];
      }
    }
    for (int j = t.art_begin; j < t.ncols; ++j) t.cost[j] = 0.0;  // basic columns

    if (iterate(t, max_iters) == LoopResult::stalled) {
      out.status = SolveStatus::numerical_failure;
      return out;
    }
    double infeas = 0.0;
    for (int i = 0; i < m; ++i) {
      if (t.basis[i] >= t.art_begin) infeas += t.rhs[i];
    }
    if (infeas > 1e-8 * b_max) {
      out.status = SolveStatus::infeasible;
      return out;
    }
    // Drive zero-level artificials out of the basis; rows that cannot pivot
    // on any real column are redundant and dropped.
    for (int i = static_cast<int>(t.body.size()) - 1; i >= 0; --i) {
      if (t.basis[i] < t.art_begin) continue;
      int col = -1;
      for (int j = 0; j < t.art_begin; ++j) {
        if (std::fabs(t.body[i][j]) > kPivotTol) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        pivot(t, i, col);
      } else {
        t.body.erase(t.body.begin() + i);
        t.rhs.erase(t.rhs.begin() + i);
        t.basis.erase(t.basis.begin() + i);
      }
    }
    for (int j = t.art_begin; j < t.ncols; ++j) t.barred[j] = true;
  }

  // Phase two: the user objective, in minimize form.
  const double sense_flip = (lp.sense == Sense::maximize) ? -1.0 : 1.0;
  std::fill(t.cost.begin(), t.cost.end(), 0.0);
  for (int j = 0; j < n; ++j) t.cost[j] = sense_flip * lp.objective[j];
  for (std::size_t i = 0; i < t.body.size(); ++i) {
    const int bj = t.basis[i];
    const double cb = (bj < n) ? sense_flip * lp.objective[bj] : 0.0;
    if (cb != 0.0) {
      for (int j = 0; j < t.ncols; ++j) t.cost[j] -= cb * t.body[i][j];
    }
  }

  switch (iterate(t, max_iters)) {
    case LoopResult::unbounded:
      out.status = SolveStatus::unbounded;
      return out;
    case LoopResult::stalled:
      out.status = SolveStatus::numerical_failure;
      return out;
    case LoopResult::optimal:
      break;
  }

  out.values.assign(n, 0.0);
  for (std::size_t i = 0; i < t.body.size(); ++i) {
    if (t.basis[i] < n) out.values[t.basis[i]] = t.rhs[i];
  }
  for (double& v : out.values) {
    if (!std::isfinite(v)) {
      out = LpSolution{};
      out.status = SolveStatus::numerical_failure;
      return out;
    }
    if (v < 0.0) {
      if (v < -1e-7) {
        out = LpSolution{};
        out.status = SolveStatus::numerical_failure;
        return out;
      }
      v = 0.0;
    }
  }
  out.objective = 0.0;
  for (int j = 0; j < n; ++j) out.objective += lp.objective[j] * out.values[j];
  out.status = SolveStatus::optimal;
  return out;
}

FeasibilityReport check_feasible(const LinearProgram& lp, const std::vector<double>& assignment) {
  if (assignment.size() != lp.vars.size()) {
    throw Error("validation-error", "assignment must cover all variables", 2);
  }
  FeasibilityReport report;
  report.feasible = true;

  auto consider = [&report](double raw, double scale, const std::string& name) {
    if (raw > report.max_residual) {
      report.max_residual = raw;
      report.worst = name;
    }
    if (raw > 1e-9 * scale) report.feasible = false;
  };

  for (std::size_t c = 0; c < lp.constraints.size(); ++c) {
    const auto& row = lp.constraints[c];
    double lhs = 0.0, magnitude = 0.0;
    for (const auto& [idx, coef] : row.terms) {
      lhs += coef * assignment[idx];
      magnitude += std::fabs(coef * assignment[idx]);
    }
    double raw = 0.0;
    switch (row.rel) {
      case Relation::le: raw = std::max(0.0, lhs - row.rhs); break;
      case Relation::ge: raw = std::max(0.0, row.rhs - lhs); break;
      case Relation::eq: raw = std::fabs(lhs - row.rhs); break;
    }
    const double scale = std::max({1.0, std::fabs(row.rhs), magnitude});
    consider(raw, scale, row.name.empty() ? "row" + std::to_string(c + 1) : row.name);
  }
  for (std::size_t i = 0; i < lp.vars.size(); ++i) {
    const double x = assignment[i];
    consider(std::max(0.0, -x), std::max(1.0, std::fabs(x)), lp.vars[i].name + " >= 0");
    if (lp.vars[i].upper) {
      consider(std::max(0.0, x - *lp.vars[i].upper), std::max(1.0, std::fabs(*lp.vars[i].upper)),
               lp.vars[i].name + " <= upper");
    }
  }
  return report;
}

FeasibilityReport check_feasible(const LinearProgram& lp,
                                 const std::map<std::string, double>& assignment) {
  std::vector<double> x(lp.vars.size(), 0.0);
  for (const auto& [name, value] : assignment) {
    const int idx = lp.variable_index(name);
    if (idx < 0) throw Error("unknown-variable", "assignment names unknown variable '" + name + "'");
    x[idx] = value;
  }
  return check_feasible(lp, x);
}

namespace {

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void append_terms(std::string& out, const std::vector<std::pair<int, double>>& terms,
                  const std::vector<std::string>& names) {
  bool any = false;
  for (const auto& [idx, coef] : terms) {
    if (coef == 0.0) continue;
    out += coef < 0.0 ? " - " : " + ";
    out += fmt_num(std::fabs(coef));
    out += ' ';
    out += names[idx];
    any = true;
  }
  if (!any) out += " 0";
}

}  // namespace

std::string dump(const LinearProgram& lp, bool positional_names) {
  std::vector<std::string> names(lp.vars.size());
  for (std::size_t i = 0; i < lp.vars.size(); ++i) {
    names[i] = positional_names ? "x" + std::to_string(i + 1) : lp.vars[i].name;
  }

  std::string out = "# linear program: " + std::to_string(lp.vars.size()) + " variables, " +
                    std::to_string(lp.constraints.size()) + " constraints\n";
  out += (lp.sense == Sense::minimize) ? "minimize\n " : "maximize\n ";
  {
    std::vector<std::pair<int, double>> obj_terms;
    for (std::size_t j = 0; j < lp.objective.size(); ++j) {
      obj_terms.emplace_back(static_cast<int>(j), lp.objective[j]);
    }
    append_terms(out, obj_terms, names);
  }
  out += "\nsubject to\n";
  for (std::size_t c = 0; c < lp.constraints.size(); ++c) {
    const auto& row = lp.constraints[c];
    out += ' ';
    out += positional_names || row.name.empty() ? "r" + std::to_string(c + 1) : row.name;
    out += ':';
    append_terms(out, row.terms, names);
    switch (row.rel) {
      case Relation::le: out += " <= "; break;
      case Relation::eq: out += " = "; break;
      case Relation::ge: out += " >= "; break;
    }
    out += fmt_num(row.rhs);
    out += '\n';
  }
  out += "bounds\n";
  for (std::size_t i = 0; i < lp.vars.size(); ++i) {
    out += " 0 <= " + names[i];
    if (lp.vars[i].upper) out += " <= " + fmt_num(*lp.vars[i].upper);
    out += '\n';
  }
  return out;
}

}  // namespace utat::lp
