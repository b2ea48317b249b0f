#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "qsched/ilp.hpp"
#include "qsched/scheduler.hpp"

namespace testing_support {

struct InstanceShape {
  int max_sats = 4;
  int max_stations = 4;
  int max_pairs = 4;
  int max_cap = 2;
  double density = 0.6;
  bool reflection = false;
  double relay_density = 0.3;
};

inline int uniform(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Integer rates so objective comparisons are exact.
inline qsched::SlotInstance random_instance(std::mt19937_64& rng, const InstanceShape& s) {
  const int n = uniform(rng, 1, s.max_sats);
  const int g = uniform(rng, 2, s.max_stations);
  std::vector<std::array<int, 2>> all;
  for (int a = 0; a < g; ++a) {
    for (int b = a + 1; b < g; ++b) all.push_back({a, b});
  }
  std::shuffle(all.begin(), all.end(), rng);
  const int m = uniform(rng, 1, std::min<int>(s.max_pairs, static_cast<int>(all.size())));
  all.resize(m);

  qsched::Grid<double> omega(n, m, 0.0);
  std::bernoulli_distribution hit(s.density);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      if (hit(rng)) omega(i, j) = uniform(rng, 1, 20);
    }
  }
  std::vector<int> sat(n), refl(n), pair(m), gs(g, 0);
  for (auto& v : sat) v = uniform(rng, 1, s.max_cap);
  for (auto& v : refl) v = uniform(rng, 0, s.max_cap);
  for (auto& v : pair) v = uniform(rng, 1, s.max_cap);
  std::vector<int> need(g, 0);
  for (int j = 0; j < m; ++j) {
    for (int st : all[j]) need[st] = std::max(need[st], pair[j]);
  }
  for (int st = 0; st < g; ++st) gs[st] = uniform(rng, std::max(need[st], 1), std::max(need[st], s.max_cap));

  auto in = qsched::make_instance(omega, all, sat, gs, pair, refl);
  if (s.reflection) {
    in.reflection_mode = true;
    std::bernoulli_distribution relay(s.relay_density);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        if (i == k) continue;
        for (int j = 0; j < m; ++j) {
          if (relay(rng)) in.nu.push_back({i, k, j, static_cast<double>(uniform(rng, 1, 20)), 0.9});
        }
      }
    }
    qsched::validate(in);
  }
  return in;
}

// Every cap equal to one.
inline qsched::SlotInstance random_single_cap(std::mt19937_64& rng, int max_sats, int max_pairs) {
  InstanceShape s;
  s.max_sats = max_sats;
  s.max_pairs = max_pairs;
  s.max_stations = 5;
  s.max_cap = 1;
  auto in = random_instance(rng, s);
  std::fill(in.sat_caps.begin(), in.sat_caps.end(), 1);
  std::fill(in.gs_caps.begin(), in.gs_caps.end(), 1);
  std::fill(in.pair_caps.begin(), in.pair_caps.end(), 1);
  return in;
}

// Receiver caps large enough never to bind.
inline qsched::SlotInstance random_unbound_receivers(std::mt19937_64& rng, int max_sats,
                                                     int max_pairs, int max_cap) {
  InstanceShape s;
  s.max_sats = max_sats;
  s.max_pairs = max_pairs;
  s.max_stations = 5;
  s.max_cap = max_cap;
  auto in = random_instance(rng, s);
  int total = 0;
  for (int t : in.sat_caps) total += t;
  for (auto& r : in.gs_caps) r = std::max(r, total);
  return in;
}

// Bounded pure-integer programs with mixed constraint senses.
inline qsched::ilp::MipProblem random_mip(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nv(1, 8), coef(-3, 6), ub(1, 3), rows(1, 4), obj(-2, 9), rel(0, 5);
  using namespace qsched::ilp;
  MipProblem mip;
  const int n = nv(rng);
  for (int j = 0; j < n; ++j) {
    mip.base.add_variable(obj(rng), {0.0, static_cast<double>(ub(rng))});
    mip.integer_vars.push_back(j);
  }
  const int m = rows(rng);
  for (int r = 0; r < m; ++r) {
    std::vector<std::pair<std::size_t, double>> terms;
    for (int j = 0; j < n; ++j) terms.push_back({static_cast<std::size_t>(j), coef(rng)});
    const int kind = rel(rng);
    const Relation relation = kind == 0 ? Relation::kGreaterEqual : kind == 1 ? Relation::kEqual : Relation::kLessEqual;
    std::uniform_int_distribution<int> rhs(relation == Relation::kGreaterEqual ? -2 : 0, 8);
    mip.base.add_constraint(terms, relation, rhs(rng));
  }
  return mip;
}

}  // namespace testing_support
