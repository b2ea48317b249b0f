#include <algorithm>
#include <cmath>
#include <limits>

#include "qsched/error.hpp"
#include "qsched/scheduler.hpp"

namespace qsched {

namespace {

// Remaining capacities during fair iteration.
struct Residual {
  std::vector<int> sat, gs, pair, refl;
  std::vector<char> active;  // per pair
  bool reflection = false;

  static Residual full(const SlotInstance& in, bool reflection) {
    return {in.sat_caps, in.gs_caps, in.pair_caps, in.reflector_caps,
            std::vector<char>(in.pair_count(), 1), reflection && in.reflection_mode};
  }
};

struct Model {
  ilp::MipProblem mip;
  std::vector<std::pair<int, int>> xcells;  // (i, j) per x variable
  std::vector<int> yentries;                // nu index per y variable
  int lambda = -1;                          // index of the max-min variable
};

// Variables for every cell with a positive rate that the residual can still
// serve. The objective is left to the caller.
Model build_model(const SlotInstance& in, const Residual& res) {
  Model md;
  auto& lp = md.mip.base;
  const std::size_t n = in.satellite_count();
  const std::size_t m = in.pair_count();
  std::vector<std::vector<std::size_t>> by_sat(n), by_gs(in.station_count()), by_pair(m),
      by_refl(n);
  std::vector<double> ub;
  auto add = [&](int i, int k, int j) {
    const auto [a, b] = in.pair_stations[j];
    int cap = std::min({res.sat[i], res.pair[j], res.gs[a], res.gs[b]});
    if (k >= 0) cap = std::min(cap, res.refl[k]);
    if (cap <= 0) return false;
    const std::size_t v = lp.add_variable(0.0, {0.0, static_cast<double>(cap)});
    md.mip.integer_vars.push_back(v);
    ub.push_back(cap);
    by_sat[i].push_back(v);
    by_pair[j].push_back(v);
    by_gs[a].push_back(v);
    by_gs[b].push_back(v);
    if (k >= 0) by_refl[k].push_back(v);
    return true;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (!res.active[j] || !(in.omega(i, j) > 0.0)) continue;
      if (add(static_cast<int>(i), -1, static_cast<int>(j))) {
        md.xcells.emplace_back(static_cast<int>(i), static_cast<int>(j));
      }
    }
  }
  if (res.reflection) {
    for (std::size_t e = 0; e < in.nu.size(); ++e) {
      const auto& r = in.nu[e];
      if (!res.active[r.pair]) continue;
      if (add(r.source, r.relay, r.pair)) md.yentries.push_back(static_cast<int>(e));
    }
  }
  auto rows = [&](const std::vector<std::vector<std::size_t>>& groups, const std::vector<int>& caps) {
    for (std::size_t r = 0; r < groups.size(); ++r) {
      double total = 0.0;
      for (auto v : groups[r]) total += ub[v];
      if (total <= caps[r]) continue;  // cannot bind
      std::vector<std::pair<std::size_t, double>> terms;
      for (auto v : groups[r]) terms.emplace_back(v, 1.0);
      lp.add_constraint(terms, ilp::Relation::kLessEqual, caps[r]);
    }
  };
  rows(by_gs, res.gs);
  rows(by_sat, res.sat);
  rows(by_pair, res.pair);
  rows(by_refl, res.refl);
  return md;
}

Allocation empty_allocation(const SlotInstance& in, Policy policy) {
  Allocation a;
  a.time = in.time;
  a.policy = policy;
  a.x = Grid<int>(in.satellite_count(), in.pair_count(), 0);
  return a;
}

void accumulate(const SlotInstance& in, const Model& md, const std::vector<double>& values,
                Allocation& alloc, const std::vector<char>* only_pairs = nullptr) {
  for (std::size_t v = 0; v < md.xcells.size(); ++v) {
    const auto [i, j] = md.xcells[v];
    if (only_pairs && !(*only_pairs)[j]) continue;
    alloc.x(i, j) = static_cast<int>(std::llround(values[v]));
  }
  for (std::size_t t = 0; t < md.yentries.size(); ++t) {
    const auto& r = in.nu[md.yentries[t]];
    if (only_pairs && !(*only_pairs)[r.pair]) continue;
    const int count = static_cast<int>(std::llround(values[md.xcells.size() + t]));
    auto it = std::find_if(alloc.y.begin(), alloc.y.end(), [&](const ReflectionConnection& c) {
      return c.source == r.source && c.relay == r.relay && c.pair == r.pair;
    });
    if (it != alloc.y.end()) {
      it->count = count;
    } else if (count != 0) {
      alloc.y.push_back({r.source, r.relay, r.pair, count});
    }
  }
}

void finish(const SlotInstance& in, Allocation& alloc) {
  alloc.y.erase(std::remove_if(alloc.y.begin(), alloc.y.end(),
                               [](const ReflectionConnection& c) { return c.count == 0; }),
                alloc.y.end());
  std::sort(alloc.y.begin(), alloc.y.end(), [](const auto& a, const auto& b) {
    return std::tie(a.source, a.relay, a.pair) < std::tie(b.source, b.relay, b.pair);
  });
  double total = 0.0;
  for (double e : per_pair_edr(in, alloc)) total += e;
  alloc.objective = total;
}

ilp::SolveStatus merge(ilp::SolveStatus a, ilp::SolveStatus b) {
  return a == ilp::SolveStatus::kGapLimit || b == ilp::SolveStatus::kGapLimit
             ? ilp::SolveStatus::kGapLimit
             : ilp::SolveStatus::kOptimal;
}

ilp::SolveResult run_mip(const Model& md, const SolverOptions& options) {
  if (md.mip.base.num_vars() == 0) {
    ilp::SolveResult r;
    r.status = ilp::SolveStatus::kOptimal;
    return r;
  }
  auto r = ilp::solve_mip(md.mip, options.mip);
  if (r.status == ilp::SolveStatus::kInfeasible || r.status == ilp::SolveStatus::kUnbounded) {
    throw StructuralError("scheduler", std::string("assignment problem reported ") +
                                           ilp::to_string(r.status));
  }
  return r;
}

Allocation ratesum(const SlotInstance& in, const Residual& res, Policy policy,
                   const SolverOptions& options) {
  validate(in);
  Model md = build_model(in, res);
  double scale = 0.0;
  for (auto [i, j] : md.xcells) scale = std::max(scale, in.omega(i, j));
  for (int e : md.yentries) scale = std::max(scale, in.nu[e].rate);
  auto& obj = md.mip.base.objective;
  for (std::size_t v = 0; v < md.xcells.size(); ++v) {
    obj[v] = in.omega(md.xcells[v].first, md.xcells[v].second) / scale;
  }
  for (std::size_t t = 0; t < md.yentries.size(); ++t) {
    obj[md.xcells.size() + t] = in.nu[md.yentries[t]].rate / scale;
  }
  Allocation alloc = empty_allocation(in, policy);
  const auto r = run_mip(md, options);
  alloc.status = r.status;
  if (!r.assignment.empty()) accumulate(in, md, r.assignment, alloc);
  finish(in, alloc);
  return alloc;
}

struct MaxMinStep {
  Model model;
  ilp::SolveResult result;
};

// Max-min over the residual; weights are indexed like in.omega / in.nu.
MaxMinStep maxmin(const SlotInstance& in, const Residual& res, const FairWeights& w,
                  const SolverOptions& options) {
  MaxMinStep step{build_model(in, res), {}};
  Model& md = step.model;
  auto& lp = md.mip.base;
  const std::size_t nvar = lp.num_vars();
  double scale = 0.0;
  std::vector<double> coeff(nvar, 0.0);
  std::vector<int> pair_of(nvar, 0);
  for (std::size_t v = 0; v < md.xcells.size(); ++v) {
    const auto [i, j] = md.xcells[v];
    coeff[v] = w.x(i, j);
    pair_of[v] = j;
  }
  for (std::size_t t = 0; t < md.yentries.size(); ++t) {
    const std::size_t v = md.xcells.size() + t;
    coeff[v] = w.y.empty() ? 0.0 : w.y[md.yentries[t]];
    pair_of[v] = in.nu[md.yentries[t]].pair;
  }
  for (double c : coeff) scale = std::max(scale, c);
  step.result.status = ilp::SolveStatus::kOptimal;
  if (!(scale > 0.0)) return step;

  std::vector<std::vector<std::pair<std::size_t, double>>> rows(in.pair_count());
  std::vector<double> reach(in.pair_count(), 0.0);
  for (std::size_t v = 0; v < nvar; ++v) {
    if (!(coeff[v] > 0.0)) continue;
    const double c = coeff[v] / scale;
    rows[pair_of[v]].emplace_back(v, c);
    reach[pair_of[v]] += c * lp.bounds[v].upper;
  }
  double lambda_ub = ilp::kInf;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (!rows[j].empty()) lambda_ub = std::min(lambda_ub, reach[j]);
  }
  md.lambda = static_cast<int>(lp.add_variable(1.0, {0.0, lambda_ub}));
  for (auto& terms : rows) {
    if (terms.empty()) continue;
    terms.emplace_back(static_cast<std::size_t>(md.lambda), -1.0);
    lp.add_constraint(terms, ilp::Relation::kGreaterEqual, 0.0);
  }
  step.result = run_mip(md, options);
  if (step.result.assignment.empty()) return step;

  // Among max-min optima, take one with the largest total weighted rate so
  // pairs that can exceed the minimum do not sit at it by accident.
  const double level = step.result.assignment[md.lambda];
  Model second = md;
  auto& lp2 = second.mip.base;
  lp2.bounds[md.lambda].lower = std::max(0.0, level - 1e-9 * std::max(1.0, level));
  lp2.objective.assign(lp2.num_vars(), 0.0);
  for (std::size_t v = 0; v < nvar; ++v) lp2.objective[v] = coeff[v] / scale;
  auto refined = run_mip(second, options);
  refined.status = merge(step.result.status, refined.status);
  step.model = std::move(second);
  step.result = std::move(refined);
  return step;
}

double weighted_rate(const SlotInstance& in, const Allocation& alloc, const FairWeights& w,
                     int pair) {
  double s = 0.0;
  for (std::size_t i = 0; i < alloc.x.rows(); ++i) s += w.x(i, pair) * alloc.x(i, pair);
  if (!w.y.empty()) {
    for (const auto& c : alloc.y) {
      if (c.pair != pair) continue;
      for (std::size_t e = 0; e < in.nu.size(); ++e) {
        const auto& r = in.nu[e];
        if (r.source == c.source && r.relay == c.relay && r.pair == c.pair) {
          s += w.y[e] * c.count;
          break;
        }
      }
    }
  }
  return s;
}

bool has_weight(const SlotInstance& in, const FairWeights& w, int pair) {
  for (std::size_t i = 0; i < w.x.rows(); ++i) {
    if (w.x(i, pair) > 0.0) return true;
  }
  for (std::size_t e = 0; e < w.y.size(); ++e) {
    if (in.nu[e].pair == pair && w.y[e] > 0.0) return true;
  }
  return false;
}

Allocation ratefair(const SlotInstance& in, bool reflection, Policy policy,
                    const SolverOptions& options) {
  validate(in);
  const auto best = uncontended_max_edr(in, options);
  FairWeights w = fractional_weights(in, best);
  if (!reflection) w.y.clear();

  Residual res = Residual::full(in, reflection);
  for (std::size_t j = 0; j < in.pair_count(); ++j) res.active[j] = best[j] > 0.0;

  Allocation alloc = empty_allocation(in, policy);
  auto step = maxmin(in, res, w, options);
  alloc.status = step.result.status;
  if (!step.result.assignment.empty()) accumulate(in, step.model, step.result.assignment, alloc);

  while (std::any_of(res.active.begin(), res.active.end(), [](char c) { return c != 0; })) {
    double lo = std::numeric_limits<double>::infinity();
    std::vector<double> level(in.pair_count(), 0.0);
    for (std::size_t j = 0; j < in.pair_count(); ++j) {
      if (!res.active[j]) continue;
      level[j] = weighted_rate(in, alloc, w, static_cast<int>(j));
      lo = std::min(lo, level[j]);
    }
    const double cut = lo + options.saturation_tolerance * std::abs(lo) + 1e-12;
    for (std::size_t j = 0; j < in.pair_count(); ++j) {
      if (!res.active[j] || level[j] > cut) continue;
      for (std::size_t i = 0; i < in.satellite_count(); ++i) {
        const int v = alloc.x(i, j);
        res.sat[i] -= v;
        res.gs[in.pair_stations[j][0]] -= v;
        res.gs[in.pair_stations[j][1]] -= v;
      }
      for (const auto& c : alloc.y) {
        if (c.pair != static_cast<int>(j)) continue;
        res.sat[c.source] -= c.count;
        res.refl[c.relay] -= c.count;
        res.gs[in.pair_stations[j][0]] -= c.count;
        res.gs[in.pair_stations[j][1]] -= c.count;
      }
      res.active[j] = 0;
    }
    if (std::none_of(res.active.begin(), res.active.end(), [](char c) { return c != 0; })) break;
    for (std::size_t i = 0; i < in.satellite_count(); ++i) {
      if (res.sat[i] < 0 || res.refl[i] < 0) {
        throw StructuralError("scheduler", "residual capacity went negative");
      }
    }
    step = maxmin(in, res, w, options);
    alloc.status = merge(alloc.status, step.result.status);
    // Unfrozen pairs take the latest solution.
    for (std::size_t j = 0; j < in.pair_count(); ++j) {
      if (!res.active[j]) continue;
      for (std::size_t i = 0; i < in.satellite_count(); ++i) alloc.x(i, j) = 0;
      for (auto& c : alloc.y) {
        if (c.pair == static_cast<int>(j)) c.count = 0;
      }
    }
    if (!step.result.assignment.empty()) {
      accumulate(in, step.model, step.result.assignment, alloc, &res.active);
    }
  }
  finish(in, alloc);
  return alloc;
}

}  // namespace

Allocation solve_primary_ratesum(const SlotInstance& in, const SolverOptions& options) {
  return ratesum(in, Residual::full(in, false), Policy::kPrimaryRatesum, options);
}

Allocation solve_reflection_ratesum(const SlotInstance& in, const SolverOptions& options) {
  return ratesum(in, Residual::full(in, true), Policy::kReflectionRatesum, options);
}

MaxMinResult solve_one_shot_maxmin(const SlotInstance& in, const FairWeights& weights,
                                   const SolverOptions& options) {
  validate(in);
  if (weights.x.rows() != in.satellite_count() || weights.x.cols() != in.pair_count() ||
      (!weights.y.empty() && weights.y.size() != in.nu.size())) {
    throw StructuralError("scheduler", "fairness weights do not match the instance");
  }
  for (double v : weights.x.values()) {
    if (!(v >= 0.0)) throw ParameterError("scheduler", "fairness weights must be nonnegative");
  }
  for (double v : weights.y) {
    if (!(v >= 0.0)) throw ParameterError("scheduler", "fairness weights must be nonnegative");
  }
  const bool reflection = !weights.y.empty();
  const Residual res = Residual::full(in, reflection);
  const auto step = maxmin(in, res, weights, options);
  MaxMinResult out;
  out.allocation = empty_allocation(
      in, reflection ? Policy::kReflectionRatefair : Policy::kPrimaryRatefair);
  out.allocation.status = step.result.status;
  if (!step.result.assignment.empty()) {
    accumulate(in, step.model, step.result.assignment, out.allocation);
  }
  finish(in, out.allocation);
  bool any = false;
  for (std::size_t j = 0; j < in.pair_count(); ++j) {
    if (!has_weight(in, weights, static_cast<int>(j))) continue;
    const double level = weighted_rate(in, out.allocation, weights, static_cast<int>(j));
    out.minimum = any ? std::min(out.minimum, level) : level;
    any = true;
  }
  return out;
}

MaxMinResult solve_one_shot_maxmin(const SlotInstance& in, const Grid<double>& weights,
                                   const SolverOptions& options) {
  return solve_one_shot_maxmin(in, FairWeights{weights, {}}, options);
}

double uncontended_max_edr(const SlotInstance& in, int pair, const SolverOptions& options) {
  if (pair < 0 || static_cast<std::size_t>(pair) >= in.pair_count()) {
    throw LookupError("scheduler", "pair index " + std::to_string(pair) + " out of range");
  }
  Residual res = Residual::full(in, true);
  std::fill(res.active.begin(), res.active.end(), 0);
  res.active[pair] = 1;
  return ratesum(in, res, Policy::kReflectionRatesum, options).objective;
}

std::vector<double> uncontended_max_edr(const SlotInstance& in, const SolverOptions& options) {
  std::vector<double> best(in.pair_count());
  for (std::size_t j = 0; j < best.size(); ++j) {
    best[j] = uncontended_max_edr(in, static_cast<int>(j), options);
  }
  return best;
}

Grid<double> fractional_weights(const Grid<double>& omega, const std::vector<double>& best) {
  if (best.size() != omega.cols()) {
    throw StructuralError("scheduler", "best-rate vector does not match pair count");
  }
  Grid<double> f(omega.rows(), omega.cols(), 0.0);
  for (std::size_t j = 0; j < omega.cols(); ++j) {
    if (best[j] < 0.0) throw ParameterError("scheduler", "best rates must be nonnegative");
    if (!(best[j] > 0.0)) continue;
    for (std::size_t i = 0; i < omega.rows(); ++i) f(i, j) = omega(i, j) / best[j];
  }
  return f;
}

FairWeights fractional_weights(const SlotInstance& in, const std::vector<double>& best) {
  FairWeights w{fractional_weights(in.omega, best), {}};
  if (in.reflection_mode) {
    w.y.reserve(in.nu.size());
    for (const auto& r : in.nu) w.y.push_back(best[r.pair] > 0.0 ? r.rate / best[r.pair] : 0.0);
  }
  return w;
}

Allocation solve_primary_ratefair(const SlotInstance& in, const SolverOptions& options) {
  if (in.reflection_mode) {
    SlotInstance primary = in;
    primary.reflection_mode = false;
    primary.nu.clear();
    auto alloc = ratefair(primary, false, Policy::kPrimaryRatefair, options);
    return alloc;
  }
  return ratefair(in, false, Policy::kPrimaryRatefair, options);
}

Allocation solve_reflection_ratefair(const SlotInstance& in, const SolverOptions& options) {
  return ratefair(in, true, Policy::kReflectionRatefair, options);
}

Allocation solve_stsr(const SlotInstance& in, const SolverOptions& options) {
  validate(in);
  auto all_one = [](const std::vector<int>& caps) {
    return std::all_of(caps.begin(), caps.end(), [](int c) { return c == 1; });
  };
  if (!all_one(in.sat_caps) || !all_one(in.gs_caps) || !all_one(in.pair_caps)) {
    throw ModeError("scheduler", "single-transmitter single-receiver mode needs every cap = 1");
  }
  std::vector<std::pair<int, int>> cells;
  std::vector<double> weights;
  for (std::size_t i = 0; i < in.satellite_count(); ++i) {
    for (std::size_t j = 0; j < in.pair_count(); ++j) {
      if (in.omega(i, j) > 0.0) {
        cells.emplace_back(static_cast<int>(i), static_cast<int>(j));
        weights.push_back(in.omega(i, j));
      }
    }
  }
  std::vector<std::pair<int, int>> edges;
  for (std::size_t u = 0; u < cells.size(); ++u) {
    for (std::size_t v = u + 1; v < cells.size(); ++v) {
      const auto& pu = in.pair_stations[cells[u].second];
      const auto& pv = in.pair_stations[cells[v].second];
      const bool shared_station =
          pu[0] == pv[0] || pu[0] == pv[1] || pu[1] == pv[0] || pu[1] == pv[1];
      if (cells[u].first == cells[v].first || shared_station) {
        edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
      }
    }
  }
  Allocation alloc = empty_allocation(in, Policy::kStsr);
  try {
    const auto set = ilp::mwis_exact(weights, edges, options.mwis_vertex_limit);
    for (int v : set.vertices) alloc.x(cells[v].first, cells[v].second) = 1;
  } catch (const SizeError&) {
    SlotInstance primary = in;
    primary.reflection_mode = false;
    primary.nu.clear();
    alloc = solve_primary_ratesum(primary, options);
    alloc.policy = Policy::kStsr;
  }
  finish(in, alloc);
  return alloc;
}

Allocation solve_stmr(const SlotInstance& in, const SolverOptions& options) {
  (void)options;
  validate(in);
  long long total_tx = 0;
  for (int t : in.sat_caps) total_tx += t;
  std::vector<long long> incident(in.station_count(), 0);
  for (std::size_t j = 0; j < in.pair_count(); ++j) {
    incident[in.pair_stations[j][0]] += in.pair_caps[j];
    incident[in.pair_stations[j][1]] += in.pair_caps[j];
  }
  for (std::size_t g = 0; g < in.station_count(); ++g) {
    if (in.gs_caps[g] < std::min(total_tx, incident[g])) {
      throw ModeError("scheduler", "receiver cap of station " + in.station_ids[g] +
                                       " can bind; matching mode does not apply");
    }
  }
  std::vector<int> row_sat, col_pair;
  for (std::size_t i = 0; i < in.satellite_count(); ++i) row_sat.insert(row_sat.end(), in.sat_caps[i], static_cast<int>(i));
  for (std::size_t j = 0; j < in.pair_count(); ++j) col_pair.insert(col_pair.end(), in.pair_caps[j], static_cast<int>(j));
  std::vector<std::vector<double>> w(row_sat.size(), std::vector<double>(col_pair.size()));
  for (std::size_t r = 0; r < row_sat.size(); ++r) {
    for (std::size_t c = 0; c < col_pair.size(); ++c) {
      const double v = in.omega(row_sat[r], col_pair[c]);
      w[r][c] = v > 0.0 ? v : -ilp::kInf;
    }
  }
  Allocation alloc = empty_allocation(in, Policy::kStmr);
  if (!row_sat.empty() && !col_pair.empty()) {
    const auto match = ilp::hungarian(w);
    for (const auto& [r, c] : match.row_to_col) alloc.x(row_sat[r], col_pair[c]) += 1;
  }
  finish(in, alloc);
  return alloc;
}

Allocation solve(const SlotInstance& in, Policy policy, const SolverOptions& options) {
  switch (policy) {
    case Policy::kPrimaryRatesum: {
      if (!in.reflection_mode) return solve_primary_ratesum(in, options);
      SlotInstance primary = in;
      primary.reflection_mode = false;
      primary.nu.clear();
      return solve_primary_ratesum(primary, options);
    }
    case Policy::kPrimaryRatefair:
      return solve_primary_ratefair(in, options);
    case Policy::kReflectionRatesum:
      return solve_reflection_ratesum(in, options);
    case Policy::kReflectionRatefair:
      return solve_reflection_ratefair(in, options);
    case Policy::kStsr:
      return solve_stsr(in, options);
    case Policy::kStmr:
      return solve_stmr(in, options);
  }
  throw ConfigError("scheduler", "unknown policy");
}

}  // namespace qsched
