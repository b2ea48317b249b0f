// Dense two-phase primal simplex on a full tableau.

#include <algorithm>
#include <cmath>

#include "qsched/error.hpp"
#include "qsched/ilp.hpp"

namespace qsched::ilp {
namespace {

constexpr const char* kComponent = "ilpcore";

// Original variable j equals offset + sum(sign * column value).
struct VarMap {
  double offset = 0.0;
  int plus = -1;
  int minus = -1;
  double plus_sign = 1.0;
};

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * (cols + 1), 0.0), basis_(rows, -1) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double rhs(std::size_t r) const { return at(r, cols_); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<int>& basis() { return basis_; }
  const std::vector<int>& basis() const { return basis_; }

  void pivot(std::size_t pr, std::size_t pc, std::vector<double>& reduced, double& value) {
    const std::size_t width = cols_ + 1;
    double* prow = &data_[pr * width];
    const double inv = 1.0 / prow[pc];
    for (std::size_t c = 0; c < width; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == pr) continue;
      double* row = &data_[r * width];
      const double f = row[pc];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < width; ++c) {
        row[c] -= f * prow[c];
        if (std::abs(row[c]) < 1e-13) row[c] = 0.0;
      }
      row[pc] = 0.0;
    }
    const double f = reduced[pc];
    if (f != 0.0) {
      for (std::size_t c = 0; c < cols_; ++c) {
        reduced[c] -= f * prow[c];
        if (std::abs(reduced[c]) < 1e-13) reduced[c] = 0.0;
      }
      reduced[pc] = 0.0;
      value += f * prow[cols_];
    }
    basis_[pr] = static_cast<int>(pc);
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
  std::vector<int> basis_;
};

enum class PhaseResult { kOptimal, kUnbounded };

// Maximises cost . x over the current tableau, only letting `enterable`
// columns into the basis.
PhaseResult run_phase(Tableau& tab, const std::vector<double>& cost,
                      const std::vector<char>& enterable, const SimplexOptions& opt,
                      std::int64_t& iterations, double& value) {
  const std::size_t n = tab.cols();
  std::vector<double> reduced(cost);
  value = 0.0;
  for (std::size_t r = 0; r < tab.rows(); ++r) {
    const double cb = cost[static_cast<std::size_t>(tab.basis()[r])];
    if (cb == 0.0) continue;
    value += cb * tab.rhs(r);
    for (std::size_t c = 0; c < n; ++c) reduced[c] -= cb * tab.at(r, c);
  }
  for (std::size_t r = 0; r < tab.rows(); ++r) reduced[static_cast<std::size_t>(tab.basis()[r])] = 0.0;

  std::int64_t local = 0;
  while (true) {
    if (iterations >= opt.max_iterations)
      throw StructuralError(kComponent, "simplex iteration limit reached");
    const bool bland = local >= opt.bland_after;
    int enter = -1;
    double best = opt.pivot_tolerance;
    for (std::size_t c = 0; c < n; ++c) {
      if (!enterable[c] || reduced[c] <= opt.pivot_tolerance) continue;
      if (bland) {
        enter = static_cast<int>(c);
        break;
      }
      if (reduced[c] > best) {
        best = reduced[c];
        enter = static_cast<int>(c);
      }
    }
    if (enter < 0) return PhaseResult::kOptimal;

    int leave = -1;
    double ratio = 0.0;
    for (std::size_t r = 0; r < tab.rows(); ++r) {
      const double a = tab.at(r, static_cast<std::size_t>(enter));
      if (a <= opt.pivot_tolerance) continue;
      const double q = tab.rhs(r) / a;
      if (leave < 0 || q < ratio - 1e-12 ||
          (q <= ratio + 1e-12 && tab.basis()[r] < tab.basis()[static_cast<std::size_t>(leave)])) {
        leave = static_cast<int>(r);
        ratio = q;
      }
    }
    if (leave < 0) return PhaseResult::kUnbounded;
    tab.pivot(static_cast<std::size_t>(leave), static_cast<std::size_t>(enter), reduced, value);
    ++iterations;
    ++local;
  }
}

}  // namespace

std::size_t LinearProgram::add_variable(double objective_coeff, Bounds b) {
  if (bounds.size() < objective.size()) bounds.resize(objective.size());
  objective.push_back(objective_coeff);
  bounds.push_back(b);
  for (auto& c : constraints) c.coeffs.resize(objective.size(), 0.0);
  return objective.size() - 1;
}

void LinearProgram::add_constraint(const std::vector<std::pair<std::size_t, double>>& terms,
                                   Relation rel, double rhs) {
  Constraint c;
  c.coeffs.assign(objective.size(), 0.0);
  for (const auto& [var, coeff] : terms) {
    if (var >= objective.size()) throw StructuralError(kComponent, "constraint references unknown variable");
    c.coeffs[var] += coeff;
  }
  c.relation = rel;
  c.rhs = rhs;
  constraints.push_back(std::move(c));
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "Optimal";
    case SolveStatus::kInfeasible: return "Infeasible";
    case SolveStatus::kUnbounded: return "Unbounded";
    case SolveStatus::kGapLimit: return "GapLimit";
  }
  return "?";
}

void validate(const LinearProgram& lp) {
  const std::size_t n = lp.num_vars();
  if (!lp.bounds.empty() && lp.bounds.size() != n)
    throw StructuralError(kComponent, "bounds size does not match objective size");
  for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
    if (lp.constraints[i].coeffs.size() != n)
      throw StructuralError(kComponent, "constraint " + std::to_string(i) + " has " +
                                            std::to_string(lp.constraints[i].coeffs.size()) +
                                            " coefficients, expected " + std::to_string(n));
  }
  for (const auto& b : lp.bounds) {
    if (b.lower > b.upper) throw StructuralError(kComponent, "variable lower bound exceeds upper bound");
    if (b.lower == kInf || b.upper == -kInf) throw StructuralError(kComponent, "empty variable domain");
  }
}

double max_violation(const LinearProgram& lp, const std::vector<double>& x) {
  if (x.size() != lp.num_vars()) return kInf;
  double worst = 0.0;
  for (const auto& c : lp.constraints) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) lhs += c.coeffs[j] * x[j];
    double v = 0.0;
    switch (c.relation) {
      case Relation::kLessEqual: v = lhs - c.rhs; break;
      case Relation::kGreaterEqual: v = c.rhs - lhs; break;
      case Relation::kEqual: v = std::abs(lhs - c.rhs); break;
    }
    worst = std::max(worst, v);
  }
  for (std::size_t j = 0; j < lp.bounds.size(); ++j) {
    worst = std::max(worst, lp.bounds[j].lower - x[j]);
    worst = std::max(worst, x[j] - lp.bounds[j].upper);
  }
  return worst;
}

SolveResult solve_lp(const LinearProgram& lp, const SimplexOptions& options) {
  validate(lp);
  const std::size_t n = lp.num_vars();
  auto bound = [&](std::size_t j) { return lp.bounds.empty() ? Bounds{} : lp.bounds[j]; };

  // Shift/split variables into nonnegative columns.
  std::vector<VarMap> vars(n);
  std::size_t cols = 0;
  std::vector<std::pair<std::size_t, double>> upper_rows;  // (column, upper)
  for (std::size_t j = 0; j < n; ++j) {
    const Bounds b = bound(j);
    VarMap& v = vars[j];
    if (std::isfinite(b.lower)) {
      v.offset = b.lower;
      v.plus = static_cast<int>(cols++);
      if (std::isfinite(b.upper)) upper_rows.emplace_back(static_cast<std::size_t>(v.plus), b.upper - b.lower);
    } else if (std::isfinite(b.upper)) {
      v.offset = b.upper;
      v.plus = static_cast<int>(cols++);
      v.plus_sign = -1.0;
    } else {
      v.plus = static_cast<int>(cols++);
      v.minus = static_cast<int>(cols++);
    }
  }
  const std::size_t structural = cols;

  struct Row {
    std::vector<std::pair<std::size_t, double>> terms;
    Relation rel;
    double rhs;
  };
  std::vector<Row> rows;
  rows.reserve(lp.constraints.size() + upper_rows.size());
  for (const auto& c : lp.constraints) {
    Row row{{}, c.relation, c.rhs};
    for (std::size_t j = 0; j < n; ++j) {
      const double a = c.coeffs[j];
      if (a == 0.0) continue;
      row.rhs -= a * vars[j].offset;
      row.terms.emplace_back(static_cast<std::size_t>(vars[j].plus), a * vars[j].plus_sign);
      if (vars[j].minus >= 0) row.terms.emplace_back(static_cast<std::size_t>(vars[j].minus), -a);
    }
    rows.push_back(std::move(row));
  }
  for (const auto& [col, ub] : upper_rows) rows.push_back({{{col, 1.0}}, Relation::kLessEqual, ub});

  // Normalise to nonnegative right-hand sides and count auxiliary columns.
  std::size_t slacks = 0;
  std::size_t artificials = 0;
  for (auto& row : rows) {
    if (row.rhs < 0.0) {
      row.rhs = -row.rhs;
      for (auto& t : row.terms) t.second = -t.second;
      if (row.rel == Relation::kLessEqual) row.rel = Relation::kGreaterEqual;
      else if (row.rel == Relation::kGreaterEqual) row.rel = Relation::kLessEqual;
    }
    if (row.rel != Relation::kEqual) ++slacks;
    if (row.rel != Relation::kLessEqual) ++artificials;
  }

  const std::size_t total = structural + slacks + artificials;
  const std::size_t first_artificial = structural + slacks;
  Tableau tab(rows.size(), total);
  std::size_t next_slack = structural;
  std::size_t next_art = first_artificial;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& [col, a] : rows[r].terms) tab.at(r, col) += a;
    tab.rhs(r) = rows[r].rhs;
    switch (rows[r].rel) {
      case Relation::kLessEqual:
        tab.at(r, next_slack) = 1.0;
        tab.basis()[r] = static_cast<int>(next_slack++);
        break;
      case Relation::kGreaterEqual:
        tab.at(r, next_slack++) = -1.0;
        tab.at(r, next_art) = 1.0;
        tab.basis()[r] = static_cast<int>(next_art++);
        break;
      case Relation::kEqual:
        tab.at(r, next_art) = 1.0;
        tab.basis()[r] = static_cast<int>(next_art++);
        break;
    }
  }

  SolveResult result;
  std::int64_t iterations = 0;
  double value = 0.0;

  if (artificials > 0) {
    std::vector<double> phase1(total, 0.0);
    for (std::size_t c = first_artificial; c < total; ++c) phase1[c] = -1.0;
    std::vector<char> enterable(total, 1);
    run_phase(tab, phase1, enterable, options, iterations, value);
    double scale = 1.0;
    for (const auto& row : rows) scale = std::max(scale, std::abs(row.rhs));
    if (value < -1e-9 * scale) {
      result.status = SolveStatus::kInfeasible;
      result.iterations = iterations;
      return result;
    }
    // Pivot zero-level artificials out of the basis where possible; rows
    // where that is impossible are redundant and stay inert.
    std::vector<double> dummy(total, 0.0);
    double dummy_value = 0.0;
    for (std::size_t r = 0; r < tab.rows(); ++r) {
      if (static_cast<std::size_t>(tab.basis()[r]) < first_artificial) continue;
      for (std::size_t c = 0; c < first_artificial; ++c) {
        if (std::abs(tab.at(r, c)) > options.pivot_tolerance) {
          tab.pivot(r, c, dummy, dummy_value);
          ++iterations;
          break;
        }
      }
    }
  }

  std::vector<double> cost(total, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double cj = lp.objective[j];
    cost[static_cast<std::size_t>(vars[j].plus)] += cj * vars[j].plus_sign;
    if (vars[j].minus >= 0) cost[static_cast<std::size_t>(vars[j].minus)] -= cj;
  }
  std::vector<char> enterable(total, 1);
  for (std::size_t c = first_artificial; c < total; ++c) enterable[c] = 0;
  const PhaseResult phase2 = run_phase(tab, cost, enterable, options, iterations, value);
  result.iterations = iterations;
  if (phase2 == PhaseResult::kUnbounded) {
    result.status = SolveStatus::kUnbounded;
    result.objective_value = kInf;
    result.bound = kInf;
    return result;
  }

  std::vector<double> colval(total, 0.0);
  for (std::size_t r = 0; r < tab.rows(); ++r) colval[static_cast<std::size_t>(tab.basis()[r])] = tab.rhs(r);
  result.assignment.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    double x = vars[j].offset + vars[j].plus_sign * colval[static_cast<std::size_t>(vars[j].plus)];
    if (vars[j].minus >= 0) x -= colval[static_cast<std::size_t>(vars[j].minus)];
    result.assignment[j] = x;
  }
  double obj = 0.0;
  for (std::size_t j = 0; j < n; ++j) obj += lp.objective[j] * result.assignment[j];
  result.status = SolveStatus::kOptimal;
  result.objective_value = obj;
  result.bound = obj;
  return result;
}

}  // namespace qsched::ilp
