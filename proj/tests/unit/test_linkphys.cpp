#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qsched/linkphys.hpp"

using namespace qsched;

namespace {

ArmChannel arm(double eta, double pd = 0.0) { return {eta, pd}; }

SourceParams source(double ns) {
  SourceParams s;
  s.mean_photon_number = ns;
  return s;
}

}  // namespace

TEST(EmissionProb, Vacuum) {
  EXPECT_EQ(emission_prob(0.0, 0), 1.0);
  EXPECT_EQ(emission_prob(0.0, 1), 0.0);
  EXPECT_EQ(emission_prob(0.0, 5), 0.0);
}

TEST(EmissionProb, TableValues) {
  EXPECT_NEAR(emission_prob(0.0078, 0), 0.98458, 1e-5);
  EXPECT_NEAR(emission_prob(0.0078, 1), 0.015240, 1e-6);
  EXPECT_NEAR(emission_prob(0.0078, 2), 1.7694e-4, 1e-8);
}

TEST(EmissionProb, NormalizesWithTail) {
  for (double ns : {0.0, 1e-4, 0.0078, 0.1, 0.5, 2.0}) {
    for (int k : {0, 2, 5, 20}) {
      double sum = emission_tail(ns, k);
      for (int n = 0; n <= k; ++n) sum += emission_prob(ns, n);
      EXPECT_NEAR(sum, 1.0, 1e-12) << ns << " " << k;
    }
    double prev = 0.0, partial = 0.0;
    for (int n = 0; n < 50; ++n) {
      partial += emission_prob(ns, n);
      EXPECT_GE(partial, prev);
      prev = partial;
    }
  }
}

TEST(FreeSpace, Example) {
  OpticsParams o;
  EXPECT_NEAR(free_space_transmissivity(o, 1000e3), 0.1817, 1e-3);
  EXPECT_NEAR(free_space_transmissivity(o, 4000e3), free_space_transmissivity(o, 2000e3) / 4, 1e-15);
  EXPECT_EQ(free_space_transmissivity(o, 10.0), 1.0);
}

TEST(ArmTransmissivity, Product) {
  EXPECT_NEAR(arm_transmissivity(0.1817, 0.8, 0.7, 0.7), 0.07123, 1e-4);
  EXPECT_EQ(arm_transmissivity(0.0, 0.8, 0.7, 0.7), 0.0);
  EXPECT_EQ(arm_transmissivity(0.5, 0.8, 0.0, 0.7), 0.0);
  EXPECT_EQ(arm_transmissivity(1, 1, 1, 1), 1.0);
}

TEST(DarkClick, Examples) {
  EXPECT_EQ(dark_click_prob(0.0, 1e-9, 1, 1e-10, 1, 737e-9), 0.0);
  const double p = dark_click_prob(1.0, 1e-9, 1, 1e-10, 1, 737e-9);
  EXPECT_NEAR(p, 1.165e-2, 1e-4);
  EXPECT_NEAR(dark_click_prob(2.0, 1e-9, 1, 1e-10, 1, 737e-9), 2 * p, 1e-15);
  EXPECT_EQ(dark_click_prob(1e6, 1e-9, 1, 1e-10, 1, 737e-9), 1.0);
  EXPECT_EQ(dark_click_prob(1.0, DetectorParams{}, OpticsParams{}), p);
}

TEST(EndToEnd, SourceFidelity) {
  const auto out = end_to_end_outcome(source(0.0078), arm(1), arm(1));
  EXPECT_NEAR(out.fidelity, 0.99, 0.005);
}

TEST(EndToEnd, WeakSourceLimit) {
  for (double eta : {1.0, 0.3, 0.01}) {
    EXPECT_NEAR(end_to_end_outcome(source(1e-6), arm(eta), arm(eta)).fidelity, 1.0, 1e-3);
  }
}

TEST(EndToEnd, MatchesEnumerationExample) {
  const auto out = end_to_end_outcome(source(0.0078), arm(0.05), arm(0.05));
  const auto ref = oracle::fock_outcome(0.0078, 0.05, 0.05, 0.0, 0.0);
  EXPECT_NEAR(out.success_prob, ref.accepted, 1e-10);
  EXPECT_NEAR(out.fidelity, ref.fidelity, 1e-10);
}

TEST(EndToEnd, MatchesEnumerationRandom) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const double ns = 0.2 * u(rng), e1 = u(rng), e2 = u(rng), d1 = 0.3 * u(rng), d2 = 0.3 * u(rng);
    const auto out = end_to_end_outcome(source(ns), arm(e1, d1), arm(e2, d2));
    const auto ref = oracle::fock_outcome(ns, e1, e2, d1, d2);
    EXPECT_NEAR(out.success_prob, ref.accepted, 1e-10);
    EXPECT_NEAR(out.fidelity, ref.fidelity, 1e-10);
  }
}

TEST(EndToEnd, SignDoesNotMatter) {
  auto plus = source(0.01);
  plus.sign = 1;
  const auto a = end_to_end_outcome(plus, arm(0.3, 0.01), arm(0.2, 0.02));
  const auto b = end_to_end_outcome(source(0.01), arm(0.3, 0.01), arm(0.2, 0.02));
  EXPECT_EQ(a.success_prob, b.success_prob);
  EXPECT_EQ(a.fidelity, b.fidelity);
}

TEST(EndToEnd, EdrIsRateTimesSuccess) {
  auto s = source(0.0078);
  s.repetition_rate = 2.5e8;
  const auto out = end_to_end_outcome(s, arm(0.1, 1e-3), arm(0.07, 2e-3));
  EXPECT_EQ(out.edr / s.repetition_rate, out.success_prob);
}

TEST(EndToEnd, MonotoneGrid) {
  const auto s = source(0.0078);
  for (int a = 0; a <= 20; ++a) {
    for (int b = 0; b <= 20; ++b) {
      const double e1 = a / 20.0, e2 = b / 20.0;
      for (double pd : {0.0, 1e-3, 0.05, 0.3}) {
        const auto base = end_to_end_outcome(s, arm(e1, pd), arm(e2, pd));
        if (a < 20) {
          EXPECT_GE(end_to_end_outcome(s, arm(e1 + 0.05, pd), arm(e2, pd)).success_prob,
                    base.success_prob - 1e-15);
        }
        if (b < 20) {
          EXPECT_GE(end_to_end_outcome(s, arm(e1, pd), arm(e2 + 0.05, pd)).success_prob,
                    base.success_prob - 1e-15);
        }
      }
    }
  }
  for (int a = 0; a < 20; ++a) {
    for (int b = 0; b <= 20; ++b) {
      const double d1 = a / 20.0, d2 = b / 20.0;
      const auto base = end_to_end_outcome(s, arm(0.3, d1), arm(0.2, d2));
      EXPECT_LE(end_to_end_outcome(s, arm(0.3, d1 + 0.05), arm(0.2, d2)).fidelity, base.fidelity + 1e-12);
    }
  }
}

TEST(EndToEnd, ProbabilitiesInRange) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const auto out = end_to_end_outcome(source(u(rng)), arm(u(rng), u(rng)), arm(u(rng), u(rng)));
    EXPECT_GE(out.success_prob, 0.0);
    EXPECT_LE(out.success_prob, 1.0);
    EXPECT_GE(out.fidelity, 0.0);
    EXPECT_LE(out.fidelity, 1.0);
  }
}

TEST(ReflectionArms, Composition) {
  const ArmChannel a{0.4, 0.01}, r{0.3, 0.02};
  auto [x1, x2] = reflection_arms(a, 1.0, 1.0, r);
  EXPECT_EQ(x1.transmissivity, a.transmissivity);
  EXPECT_EQ(x2.transmissivity, r.transmissivity);
  EXPECT_EQ(x2.dark_click_prob, r.dark_click_prob);
  EXPECT_EQ(reflection_arms(a, 0.0, 0.9, r).second.transmissivity, 0.0);
  EXPECT_EQ(reflection_arms(a, 0.5, 0.0, r).second.transmissivity, 0.0);
  EXPECT_NEAR(reflection_arms(a, 0.5, 0.8, r).second.transmissivity, 0.5 * 0.8 * 0.3, 1e-15);
  EXPECT_NEAR(reflection_arms(a, 0.8, 0.5, r).second.transmissivity, 0.5 * 0.8 * 0.3, 1e-15);
}

TEST(RateFidelityCurve, Tradeoff) {
  std::vector<double> grid;
  for (int k = 0; k < 20; ++k) grid.push_back(1e-4 * std::pow(1e3, k / 19.0));
  const auto curve = rate_fidelity_curve(grid, arm(0.07), arm(0.05));
  ASSERT_EQ(curve.size(), grid.size());
  for (std::size_t k = 1; k < curve.size(); ++k) {
    EXPECT_GT(curve[k].edr, curve[k - 1].edr);
    EXPECT_LT(curve[k].fidelity, curve[k - 1].fidelity);
  }
}

TEST(RateFidelityCurve, SinglePointMatches) {
  const auto curve = rate_fidelity_curve({0.0078}, arm(0.1, 1e-3), arm(0.2, 1e-3));
  const auto out = end_to_end_outcome(source(0.0078), arm(0.1, 1e-3), arm(0.2, 1e-3));
  ASSERT_EQ(curve.size(), 1u);
  EXPECT_EQ(curve[0].edr, out.edr);
  EXPECT_EQ(curve[0].fidelity, out.fidelity);
}
