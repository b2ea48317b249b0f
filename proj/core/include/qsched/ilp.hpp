#pragma once

// Self-contained optimisation engine: dense two-phase simplex, best-first
// branch and bound, Hungarian assignment, exact weighted independent set,
// and an enumeration oracle.

#include <cstdint>
#include <limits>
#include <map>
#include <vector>

namespace qsched::ilp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

struct Constraint {
  std::vector<double> coeffs;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
};

struct Bounds {
  double lower = 0.0;
  double upper = kInf;
};

// maximize objective . x  subject to constraints and variable bounds.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<Constraint> constraints;
  std::vector<Bounds> bounds;  // empty means [0, inf) for every variable

  std::size_t num_vars() const { return objective.size(); }

  // Appends a variable and returns its index.
  std::size_t add_variable(double objective_coeff, Bounds b = {});
  // Sparse helper: terms are (variable, coefficient).
  void add_constraint(const std::vector<std::pair<std::size_t, double>>& terms, Relation rel,
                      double rhs);
};

struct MipProblem {
  LinearProgram base;
  std::vector<std::size_t> integer_vars;
};

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kGapLimit };

const char* to_string(SolveStatus status);

struct SolveResult {
  SolveStatus status = SolveStatus::kInfeasible;
  double objective_value = 0.0;
  std::vector<double> assignment;
  double gap = 0.0;      // relative optimality gap (0 when proven optimal)
  double bound = 0.0;    // best known upper bound on the objective
  std::int64_t nodes = 0;
  std::int64_t iterations = 0;
};

struct SimplexOptions {
  double pivot_tolerance = 1e-9;
  // Dantzig pricing switches to Bland's rule after this many pivots.
  std::int64_t bland_after = 5000;
  std::int64_t max_iterations = 1000000;
};

// Throws StructuralError on dimension mismatches or lower > upper.
void validate(const LinearProgram& lp);

SolveResult solve_lp(const LinearProgram& lp, const SimplexOptions& options = {});

struct MipOptions {
  std::int64_t node_limit = 100000;
  double integrality_tolerance = 1e-6;
  double relative_gap = 1e-9;
  SimplexOptions simplex;
};

// Best-first branch and bound on the LP relaxation; branches on the most
// fractional integer variable (lowest index on ties). Integer variables
// must have finite bounds. Throws ParameterError for node_limit <= 0.
SolveResult solve_mip(const MipProblem& mip, const MipOptions& options = {});

// Exhaustive enumeration over the integer variables; any continuous
// variables are optimised by solve_lp for each integer assignment. Throws
// SizeError when the enumeration exceeds max_assignments.
SolveResult brute_force_mip(const MipProblem& mip, double max_assignments = 1e7);

// Largest constraint or bound violation of x (0 when feasible).
double max_violation(const LinearProgram& lp, const std::vector<double>& x);

struct Matching {
  std::map<int, int> row_to_col;
  double total = 0.0;
};

// Maximum-weight (not necessarily perfect) matching on a dense rows x cols
// weight matrix. Cells equal to -inf are forbidden; cells with weight <= 0
// are never matched.
Matching hungarian(const std::vector<std::vector<double>>& weights);

struct IndependentSet {
  std::vector<int> vertices;  // ascending
  double total = 0.0;
};

// Exact maximum-weight independent set by branch and bound with
// clique-cover bounds. Throws SizeError when the vertex count exceeds
// vertex_limit.
IndependentSet mwis_exact(const std::vector<double>& vertex_weights,
                          const std::vector<std::pair<int, int>>& edges,
                          int vertex_limit = 512);

}  // namespace qsched::ilp
