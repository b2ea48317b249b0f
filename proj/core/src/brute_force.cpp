#include <cmath>

#include "qsched/error.hpp"
#include "qsched/ilp.hpp"

namespace qsched::ilp {

SolveResult brute_force_mip(const MipProblem& mip, double max_assignments) {
  validate(mip.base);
  const std::size_t n = mip.base.num_vars();
  std::vector<Bounds> bounds = mip.base.bounds.empty() ? std::vector<Bounds>(n) : mip.base.bounds;

  std::vector<char> is_int(n, 0);
  std::vector<long long> lo, hi;
  double domain = 1.0;
  for (std::size_t idx : mip.integer_vars) {
    if (idx >= n) throw StructuralError("ilpcore", "integer variable index out of range");
    is_int[idx] = 1;
    const Bounds& b = bounds[idx];
    if (!std::isfinite(b.lower) || !std::isfinite(b.upper))
      throw SizeError("ilpcore", "brute force needs finite integer bounds");
    const long long l = static_cast<long long>(std::ceil(b.lower - 1e-9));
    const long long h = static_cast<long long>(std::floor(b.upper + 1e-9));
    lo.push_back(l);
    hi.push_back(h);
    domain *= static_cast<double>(std::max(0LL, h - l + 1));
  }
  if (domain > max_assignments) throw SizeError("ilpcore", "integer domain too large for enumeration");

  bool continuous = false;
  for (std::size_t j = 0; j < n; ++j) continuous = continuous || !is_int[j];

  SolveResult best;
  best.status = SolveStatus::kInfeasible;
  if (domain == 0.0) return best;

  std::vector<long long> cur = lo;
  std::vector<double> x(n, 0.0);
  LinearProgram fixed = mip.base;
  fixed.bounds = bounds;
  bool have = false;

  while (true) {
    for (std::size_t k = 0; k < cur.size(); ++k) x[mip.integer_vars[k]] = static_cast<double>(cur[k]);

    if (continuous) {
      for (std::size_t k = 0; k < cur.size(); ++k) {
        fixed.bounds[mip.integer_vars[k]] = {static_cast<double>(cur[k]), static_cast<double>(cur[k])};
      }
      SolveResult sub = solve_lp(fixed);
      if (sub.status == SolveStatus::kUnbounded) {
        best.status = SolveStatus::kUnbounded;
        best.objective_value = kInf;
        return best;
      }
      if (sub.status == SolveStatus::kOptimal && (!have || sub.objective_value > best.objective_value)) {
        have = true;
        best.objective_value = sub.objective_value;
        best.assignment = sub.assignment;
        for (std::size_t k = 0; k < cur.size(); ++k)
          best.assignment[mip.integer_vars[k]] = static_cast<double>(cur[k]);
      }
    } else if (max_violation(mip.base, x) <= 1e-9) {
      double obj = 0.0;
      for (std::size_t j = 0; j < n; ++j) obj += mip.base.objective[j] * x[j];
      if (!have || obj > best.objective_value) {
        have = true;
        best.objective_value = obj;
        best.assignment = x;
      }
    }

    std::size_t k = 0;
    while (k < cur.size() && cur[k] == hi[k]) {
      cur[k] = lo[k];
      ++k;
    }
    if (k == cur.size()) break;
    ++cur[k];
  }

  if (have) {
    best.status = SolveStatus::kOptimal;
    best.bound = best.objective_value;
  }
  return best;
}

}  // namespace qsched::ilp
