#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "instances.hpp"
#include "oracles.hpp"
#include "qsched/error.hpp"
#include "qsched/ilp.hpp"

using namespace qsched::ilp;

using testing_support::random_mip;

TEST(Simplex, SingleBound) {
  LinearProgram lp;
  lp.add_variable(1.0);
  lp.add_constraint({{0, 1.0}}, Relation::kLessEqual, 5.0);
  const auto r = solve_lp(lp);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_NEAR(r.objective_value, 5.0, 1e-9);
}

TEST(Simplex, DegenerateOptimum) {
  LinearProgram lp;
  lp.add_variable(1.0);
  lp.add_variable(1.0);
  lp.add_constraint({{0, 1.0}, {1, 1.0}}, Relation::kLessEqual, 1.0);
  const auto r = solve_lp(lp);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_NEAR(r.objective_value, 1.0, 1e-9);
}

TEST(Simplex, InfeasibleAndUnbounded) {
  LinearProgram lp;
  lp.add_variable(1.0);
  lp.add_constraint({{0, 1.0}}, Relation::kGreaterEqual, 3.0);
  EXPECT_EQ(solve_lp(lp).status, SolveStatus::kUnbounded);
  lp.add_constraint({{0, 1.0}}, Relation::kLessEqual, 2.0);
  EXPECT_EQ(solve_lp(lp).status, SolveStatus::kInfeasible);
}

TEST(Simplex, DimensionMismatchThrows) {
  LinearProgram lp;
  lp.add_variable(1.0);
  lp.constraints.push_back({{1.0, 2.0}, Relation::kLessEqual, 1.0});
  EXPECT_THROW(solve_lp(lp), qsched::StructuralError);
  LinearProgram bad;
  bad.add_variable(1.0, {2.0, 1.0});
  EXPECT_THROW(solve_lp(bad), qsched::StructuralError);
}

TEST(Simplex, MatchesVertexOracle) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> nv(1, 6), rows(1, 5), coef(-4, 7), rhs(0, 12), ub(1, 6);
  std::uniform_real_distribution<double> obj(-3.0, 5.0);
  int checked = 0;
  while (checked < 20) {
    LinearProgram lp;
    const int n = nv(rng);
    for (int j = 0; j < n; ++j) lp.add_variable(obj(rng), {0.0, static_cast<double>(ub(rng))});
    const int m = rows(rng);
    for (int r = 0; r < m; ++r) {
      std::vector<std::pair<std::size_t, double>> t;
      for (int j = 0; j < n; ++j) t.push_back({static_cast<std::size_t>(j), coef(rng)});
      lp.add_constraint(t, r % 3 == 2 ? Relation::kGreaterEqual : Relation::kLessEqual, rhs(rng) - (r % 3 == 2 ? 6 : 0));
    }
    const auto ref = oracle::lp_by_vertices(lp);
    const auto got = solve_lp(lp);
    if (!ref.feasible) {
      EXPECT_EQ(got.status, SolveStatus::kInfeasible);
      continue;
    }
    ASSERT_EQ(got.status, SolveStatus::kOptimal);
    EXPECT_NEAR(got.objective_value, ref.value, 1e-6);
    EXPECT_LE(max_violation(lp, got.assignment), 1e-7);
    ++checked;
  }
}

TEST(Mip, IntegralRelaxationNeedsNoBranching) {
  MipProblem mip;
  mip.base.add_variable(2.0, {0, 3});
  mip.base.add_variable(1.0, {0, 2});
  mip.base.add_constraint({{0, 1.0}, {1, 1.0}}, Relation::kLessEqual, 4.0);
  mip.integer_vars = {0, 1};
  const auto r = solve_mip(mip);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_EQ(r.objective_value, 7.0);
  EXPECT_EQ(r.nodes, 1);
}

TEST(Mip, Knapsack) {
  MipProblem mip;
  mip.base.add_variable(5.0, {0, 1});
  mip.base.add_variable(4.0, {0, 1});
  mip.base.add_constraint({{0, 3.0}, {1, 2.0}}, Relation::kLessEqual, 4.0);
  mip.integer_vars = {0, 1};
  const auto r = solve_mip(mip);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_NEAR(r.objective_value, 5.0, 1e-9);
  EXPECT_EQ(r.assignment[0], 1.0);
  EXPECT_EQ(r.assignment[1], 0.0);
  EXPECT_NEAR(brute_force_mip(mip).objective_value, 5.0, 1e-9);
}

TEST(Mip, RejectsBadNodeLimit) {
  MipProblem mip;
  mip.base.add_variable(1.0, {0, 1});
  mip.integer_vars = {0};
  MipOptions o;
  o.node_limit = 0;
  EXPECT_THROW(solve_mip(mip, o), qsched::ParameterError);
}

// Max-min over packing rows: the root relaxation is fractional and a one-node
// budget leaves no room to branch, so only rounding can supply a point.
TEST(Mip, NodeLimitStillReturnsFeasiblePoint) {
  MipProblem mip;
  auto& lp = mip.base;
  for (int j = 0; j < 6; ++j) mip.integer_vars.push_back(lp.add_variable(0.0, {0, 1}));
  const auto lambda = lp.add_variable(1.0, {0, 10});
  for (int a = 0; a < 3; ++a) {
    lp.add_constraint({{std::size_t(2 * a), 1.0}, {std::size_t(2 * a + 1), 1.0}}, Relation::kLessEqual, 1.0);
  }
  lp.add_constraint({{0, 1.5}, {2, 1.5}, {4, 1.5}, {lambda, -1.0}}, Relation::kGreaterEqual, 0.0);
  lp.add_constraint({{1, 1.0}, {3, 1.0}, {5, 1.0}, {lambda, -1.0}}, Relation::kGreaterEqual, 0.0);
  MipOptions o;
  o.node_limit = 1;
  const auto r = solve_mip(mip, o);
  ASSERT_EQ(r.assignment.size(), lp.num_vars());
  EXPECT_LE(max_violation(lp, r.assignment), 1e-9);
  EXPECT_LE(r.objective_value, brute_force_mip(mip).objective_value + 1e-9);
  if (r.status == SolveStatus::kGapLimit) EXPECT_GE(r.bound, r.objective_value);
}

TEST(BruteForce, EmptyAndTooLarge) {
  MipProblem empty;
  const auto r = brute_force_mip(empty);
  EXPECT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_EQ(r.objective_value, 0.0);
  MipProblem big;
  for (int j = 0; j < 10; ++j) {
    big.base.add_variable(1.0, {0, 9});
    big.integer_vars.push_back(j);
  }
  EXPECT_THROW(brute_force_mip(big, 1e7), qsched::SizeError);
}

TEST(Mip, MatchesEnumeration) {
  std::mt19937_64 rng(99);
  for (int k = 0; k < 200; ++k) {
    const auto mip = random_mip(rng);
    const auto oracle_result = oracle::best_integer_point(mip.base);
    const bool feasible = oracle_result.feasible;
    const double ref = oracle_result.value;
    const auto got = solve_mip(mip);
    const auto brute = brute_force_mip(mip);
    if (!feasible) {
      EXPECT_EQ(got.status, SolveStatus::kInfeasible) << k;
      EXPECT_EQ(brute.status, SolveStatus::kInfeasible) << k;
      continue;
    }
    ASSERT_EQ(got.status, SolveStatus::kOptimal) << k;
    EXPECT_NEAR(got.objective_value, ref, 1e-7) << k;
    EXPECT_NEAR(brute.objective_value, ref, 1e-7) << k;
    EXPECT_LE(max_violation(mip.base, got.assignment), 1e-7);
    for (auto j : mip.integer_vars) EXPECT_EQ(got.assignment[j], std::round(got.assignment[j]));
    const auto relax = solve_lp(mip.base);
    ASSERT_EQ(relax.status, SolveStatus::kOptimal);
    EXPECT_GE(relax.objective_value, got.objective_value - 1e-7);
  }
}

TEST(Mip, Deterministic) {
  std::mt19937_64 rng(123);
  for (int k = 0; k < 30; ++k) {
    const auto mip = random_mip(rng);
    const auto a = solve_mip(mip), b = solve_mip(mip);
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.assignment, b.assignment);
    EXPECT_EQ(a.objective_value, b.objective_value);
    EXPECT_EQ(a.nodes, b.nodes);
  }
}

TEST(Hungarian, SmallExample) {
  const auto m = hungarian({{3, 1}, {2, 4}});
  EXPECT_EQ(m.total, 7.0);
  EXPECT_EQ(m.row_to_col, (std::map<int, int>{{0, 0}, {1, 1}}));
}

TEST(Hungarian, Diagonal) {
  std::vector<std::vector<double>> w(4, std::vector<double>(4, 0.0));
  for (int i = 0; i < 4; ++i) w[i][i] = 1.0 + i;
  const auto m = hungarian(w);
  EXPECT_EQ(m.total, 10.0);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(m.row_to_col.at(i), i);
}

TEST(Hungarian, ForbiddenCellsAndRectangular) {
  const double f = -kInf;
  const auto m = hungarian({{f, 5, 1}, {f, 6, f}});
  EXPECT_EQ(m.total, 7.0);
  EXPECT_EQ(m.row_to_col.at(0), 2);
  EXPECT_EQ(m.row_to_col.at(1), 1);
  EXPECT_EQ(hungarian({}).total, 0.0);
  EXPECT_TRUE(hungarian({{f, f}}).row_to_col.empty());
}

TEST(Hungarian, MatchesPermutationOracle) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> w(-5, 30);
  std::bernoulli_distribution forbid(0.15);
  for (int k = 0; k < 100; ++k) {
    std::vector<std::vector<double>> m(6, std::vector<double>(6));
    for (auto& row : m) {
      for (auto& c : row) c = forbid(rng) ? -kInf : w(rng);
    }
    const auto got = hungarian(m);
    EXPECT_NEAR(got.total, oracle::best_matching(m), 1e-9) << k;
    std::set<int> cols;
    double sum = 0.0;
    for (auto [r, c] : got.row_to_col) {
      EXPECT_TRUE(std::isfinite(m[r][c]));
      EXPECT_TRUE(cols.insert(c).second);
      sum += m[r][c];
    }
    EXPECT_NEAR(sum, got.total, 1e-9);
  }
}

TEST(Mwis, Edgeless) {
  const auto s = mwis_exact({3, 0, 2, -1, 4}, {});
  EXPECT_EQ(s.vertices, (std::vector<int>{0, 2, 4}));
  EXPECT_EQ(s.total, 9.0);
}

TEST(Mwis, SingleEdge) {
  const auto s = mwis_exact({5, 3}, {{0, 1}});
  EXPECT_EQ(s.vertices, std::vector<int>{0});
  EXPECT_EQ(s.total, 5.0);
}

TEST(Mwis, VertexLimit) {
  EXPECT_THROW(mwis_exact(std::vector<double>(10, 1.0), {}, 5), qsched::SizeError);
}

TEST(Mwis, MatchesSubsetOracle) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> nv(1, 18), w(1, 25);
  std::uniform_real_distribution<double> dens(0.05, 0.6);
  for (int k = 0; k < 50; ++k) {
    const int n = nv(rng);
    std::vector<double> weights(n);
    for (auto& x : weights) x = w(rng);
    std::bernoulli_distribution edge(dens(rng));
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        if (edge(rng)) edges.push_back({a, b});
      }
    }
    const auto got = mwis_exact(weights, edges);
    EXPECT_NEAR(got.total, oracle::best_independent_set(weights, edges), 1e-9) << k;
    std::set<int> chosen(got.vertices.begin(), got.vertices.end());
    for (auto [a, b] : edges) EXPECT_FALSE(chosen.count(a) && chosen.count(b));
    EXPECT_EQ(got.vertices, mwis_exact(weights, edges).vertices);
  }
}
