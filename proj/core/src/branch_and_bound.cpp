#include <algorithm>
#include <cmath>
#include <queue>

#include "qsched/error.hpp"
#include "qsched/ilp.hpp"

namespace qsched::ilp {
namespace {

constexpr const char* kComponent = "ilpcore";

struct Node {
  std::int64_t id = 0;
  int depth = 0;
  std::vector<Bounds> bounds;
  SolveResult relaxation;
};

// Highest bound first; deeper nodes first on ties (dives towards an
// incumbent on flat max-min plateaus), then creation order.
struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.relaxation.objective_value != b.relaxation.objective_value)
      return a.relaxation.objective_value < b.relaxation.objective_value;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

// Index (into mip.integer_vars) of the most fractional variable, or -1.
int most_fractional(const MipProblem& mip, const std::vector<double>& x, double tol) {
  int best = -1;
  double best_frac = 0.0;
  for (std::size_t k = 0; k < mip.integer_vars.size(); ++k) {
    const double v = x[mip.integer_vars[k]];
    const double frac = std::abs(v - std::round(v));
    if (frac <= tol) continue;
    if (best < 0 || frac > best_frac + 1e-12) {
      best = static_cast<int>(k);
      best_frac = frac;
    }
  }
  return best;
}

}  // namespace

SolveResult solve_mip(const MipProblem& mip, const MipOptions& options) {
  if (options.node_limit <= 0) throw ParameterError(kComponent, "node_limit must be positive");
  validate(mip.base);
  const std::size_t n = mip.base.num_vars();
  std::vector<Bounds> root_bounds = mip.base.bounds.empty() ? std::vector<Bounds>(n) : mip.base.bounds;
  for (std::size_t idx : mip.integer_vars) {
    if (idx >= n) throw StructuralError(kComponent, "integer variable index out of range");
    Bounds& b = root_bounds[idx];
    if (!std::isfinite(b.lower) || !std::isfinite(b.upper))
      throw ParameterError(kComponent, "integer variables need finite bounds");
    b.lower = std::ceil(b.lower - options.integrality_tolerance);
    b.upper = std::floor(b.upper + options.integrality_tolerance);
  }

  LinearProgram work = mip.base;
  auto relax = [&](const std::vector<Bounds>& bounds) {
    work.bounds = bounds;
    for (const auto& b : bounds) {
      if (b.lower > b.upper) {
        SolveResult infeasible;
        infeasible.status = SolveStatus::kInfeasible;
        return infeasible;
      }
    }
    return solve_lp(work, options.simplex);
  };

  SolveResult result;
  std::int64_t nodes = 1;
  std::int64_t next_id = 0;
  Node root{next_id++, 0, root_bounds, relax(root_bounds)};
  result.iterations += root.relaxation.iterations;
  if (root.relaxation.status != SolveStatus::kOptimal) {
    result.status = root.relaxation.status;
    result.nodes = nodes;
    return result;
  }

  bool have_incumbent = false;
  double incumbent = -kInf;
  std::vector<double> best_x;
  auto tolerance = [&](double v) { return options.relative_gap * std::max(1.0, std::abs(v)); };

  // Round integer variables of a relaxation down and re-solve the continuous
  // part; yields an incumbent early on packing-like models.
  auto try_rounding = [&](const Node& node) {
    std::vector<Bounds> fixed = node.bounds;
    for (std::size_t idx : mip.integer_vars) {
      const double v = std::floor(node.relaxation.assignment[idx] + options.integrality_tolerance);
      const double c = std::clamp(v, fixed[idx].lower, fixed[idx].upper);
      fixed[idx] = {c, c};
    }
    auto r = relax(fixed);
    result.iterations += r.iterations;
    if (r.status != SolveStatus::kOptimal) return;
    if (!have_incumbent || r.objective_value > incumbent) {
      have_incumbent = true;
      incumbent = r.objective_value;
      best_x = std::move(r.assignment);
    }
  };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  if (most_fractional(mip, root.relaxation.assignment, options.integrality_tolerance) >= 0) try_rounding(root);
  open.push(std::move(root));
  bool hit_limit = false;
  std::int64_t expanded = 0;

  while (!open.empty()) {
    if (have_incumbent && open.top().relaxation.objective_value <= incumbent + tolerance(incumbent)) break;
    Node node = open.top();
    open.pop();

    const int branch = most_fractional(mip, node.relaxation.assignment, options.integrality_tolerance);
    if (branch < 0) {
      if (!have_incumbent || node.relaxation.objective_value > incumbent) {
        have_incumbent = true;
        incumbent = node.relaxation.objective_value;
        best_x = node.relaxation.assignment;
      }
      continue;
    }
    if (nodes + 2 > options.node_limit) {
      open.push(std::move(node));
      hit_limit = true;
      break;
    }

    if (!have_incumbent && ++expanded % 64 == 0) try_rounding(node);

    const std::size_t var = mip.integer_vars[static_cast<std::size_t>(branch)];
    const double v = node.relaxation.assignment[var];
    for (int side = 0; side < 2; ++side) {
      std::vector<Bounds> child_bounds = node.bounds;
      if (side == 0) child_bounds[var].upper = std::floor(v);
      else child_bounds[var].lower = std::ceil(v);
      Node child{next_id++, node.depth + 1, std::move(child_bounds), {}};
      child.relaxation = relax(child.bounds);
      ++nodes;
      result.iterations += child.relaxation.iterations;
      if (child.relaxation.status == SolveStatus::kInfeasible) continue;
      if (child.relaxation.status == SolveStatus::kUnbounded) {
        result.status = SolveStatus::kUnbounded;
        result.nodes = nodes;
        return result;
      }
      if (have_incumbent && child.relaxation.objective_value <= incumbent + tolerance(incumbent)) continue;
      open.push(std::move(child));
    }
  }

  result.nodes = nodes;
  if (!have_incumbent && !hit_limit) {
    result.status = SolveStatus::kInfeasible;
    return result;
  }

  double open_bound = -kInf;
  if (hit_limit && !open.empty()) open_bound = open.top().relaxation.objective_value;

  if (have_incumbent) {
    for (std::size_t idx : mip.integer_vars) best_x[idx] = std::round(best_x[idx]);
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += mip.base.objective[j] * best_x[j];
    result.assignment = std::move(best_x);
    result.objective_value = obj;
  } else {
    result.objective_value = -kInf;
  }

  if (hit_limit && open_bound > result.objective_value + tolerance(result.objective_value)) {
    result.status = SolveStatus::kGapLimit;
    result.bound = open_bound;
    result.gap = have_incumbent
                     ? (open_bound - result.objective_value) / std::max(1.0, std::abs(result.objective_value))
                     : kInf;
  } else {
    result.status = SolveStatus::kOptimal;
    result.bound = result.objective_value;
    result.gap = 0.0;
  }
  return result;
}

}  // namespace qsched::ilp
