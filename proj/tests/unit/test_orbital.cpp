#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "qsched/error.hpp"
#include "qsched/orbital.hpp"

using namespace qsched;

namespace {

constexpr double kRe = 6371e3;

ConstellationConfig small_config() {
  ConstellationConfig c;
  c.rings = 4;
  c.sats_per_ring = 10;
  return c;
}

}  // namespace

TEST(OrbitalPeriod, KeplerAt1000Km) {
  ConstellationConfig c;
  c.gravitational_parameter = 3.986e14;
  EXPECT_NEAR(orbital_period(c), 6298.0, 1.0);
  const double r = kRe + 1000e3;
  EXPECT_NEAR(orbital_period(c), 2 * kPi * std::sqrt(r * r * r / 3.986e14), 1e-9);
}

TEST(OrbitalConfig, RejectsEmptyConstellation) {
  ConstellationConfig c;
  c.rings = 0;
  EXPECT_THROW(validate(c), ConfigError);
  c.rings = 2;
  c.sats_per_ring = 0;
  EXPECT_THROW(propagate(c, {}, 0, 10.0), ConfigError);
  c.sats_per_ring = 3;
  c.altitude_m = -1;
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(OrbitalConfig, RejectsBadStation) {
  EXPECT_THROW(validate(GroundStation{"X", 91.0, 0.0, 1}), ConfigError);
  EXPECT_THROW(validate(GroundStation{"X", 0.0, 181.0, 1}), ConfigError);
  EXPECT_THROW(validate(GroundStation{"X", 0.0, 0.0, -1}), ConfigError);
}

TEST(Propagate, StationsRepeatAfterOneRotation) {
  ConstellationConfig c = small_config();
  std::vector<GroundStation> gs = {{"A", 40.0, -74.0, 10}, {"B", -33.0, 151.0, 10}};
  const auto s0 = propagate(c, gs, 0, 10.0);
  const auto s1 = propagate(c, gs, 8640, 10.0);
  for (std::size_t g = 0; g < gs.size(); ++g) {
    EXPECT_NEAR((s0.station_position(g) - s1.station_position(g)).norm(), 0.0, 1e-6);
  }
}

TEST(Propagate, SingleSatelliteStartsOverOrigin) {
  ConstellationConfig c;
  c.rings = 1;
  c.sats_per_ring = 1;
  const auto snap = propagate(c, {}, 0, 10.0);
  const auto sub = subpoint(snap.satellite_position(0), snap.elapsed_s(), c.earth_rotation_period_s);
  EXPECT_NEAR(sub[0], 0.0, 1e-9);
  EXPECT_NEAR(sub[1], 0.0, 1e-9);
}

TEST(Propagate, RadiiArePreserved) {
  ConstellationConfig c = small_config();
  std::vector<GroundStation> gs = {{"A", 12.0, 34.0, 10}};
  for (int t : {0, 1, 17, 500, 8639}) {
    const auto snap = propagate(c, gs, t, 10.0);
    for (std::size_t i = 0; i < snap.satellite_count(); ++i) {
      EXPECT_NEAR(snap.satellite_position(i).norm() / (kRe + c.altitude_m), 1.0, 1e-6);
    }
    EXPECT_NEAR(snap.station_position(std::size_t{0}).norm(), kRe, 1e-6);
  }
}

TEST(Propagate, SatelliteIdsAndLookup) {
  const auto snap = propagate(small_config(), {{"A", 0, 0, 1}}, 0, 10.0);
  EXPECT_EQ(snap.satellite_count(), 40u);
  EXPECT_EQ(snap.satellite_ids().front(), "S0-0");
  EXPECT_EQ(snap.satellite_index("S3-9"), 39u);
  EXPECT_THROW(snap.satellite_index("nope"), LookupError);
  EXPECT_THROW(snap.station_index("nope"), LookupError);
}

TEST(LinkGeometry, Zenith) {
  const Vec3 gs{kRe, 0, 0};
  const Vec3 sat{kRe + 1000e3, 0, 0};
  const auto geo = link_geometry(sat, gs, 20e3);
  EXPECT_DOUBLE_EQ(geo.elevation_deg, 90.0);
  EXPECT_NEAR(geo.slant_range_m, 1000e3, 1e-6);
  EXPECT_NEAR(geo.atmospheric_path_m, 20e3, 1e-6);
}

TEST(LinkGeometry, BelowHorizonIsNegative) {
  const Vec3 gs{kRe, 0, 0};
  const Vec3 sat{-(kRe + 1000e3), 0, 0};
  EXPECT_LT(link_geometry(sat, gs).elevation_deg, 0.0);
}

TEST(LinkGeometry, AtmosphericPathNeverExceedsSlant) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int k = 0; k < 500; ++k) {
    const double a = ang(rng), b = ang(rng) / 2;
    const Vec3 sat{(kRe + 600e3) * std::cos(a) * std::cos(b), (kRe + 600e3) * std::sin(a) * std::cos(b),
                   (kRe + 600e3) * std::sin(b)};
    const auto geo = link_geometry(sat, Vec3{kRe, 0, 0});
    EXPECT_LE(geo.atmospheric_path_m, geo.slant_range_m + 1e-9);
    EXPECT_GE(geo.elevation_deg, -90.0);
    EXPECT_LE(geo.elevation_deg, 90.0);
  }
}

TEST(LinkGeometry, UnknownIdThrows) {
  const auto snap = propagate(small_config(), {{"A", 0, 0, 1}}, 0, 10.0);
  EXPECT_THROW(link_geometry(snap, "S0-0", "B"), LookupError);
  EXPECT_NO_THROW(link_geometry(snap, "S0-0", "A"));
}

TEST(LinkGeometry, ElevationContinuousAlongPass) {
  ConstellationConfig c = small_config();
  c.altitude_m = 500e3;
  std::vector<GroundStation> gs = {{"A", 20.0, 10.0, 1}};
  double prev = 0.0;
  for (int t = 0; t < 2000; ++t) {
    const auto snap = propagate(c, gs, t, 10.0);
    const double e = link_geometry(snap, "S1-2", "A").elevation_deg;
    if (t > 0) EXPECT_LT(std::abs(e - prev), 5.0) << "t=" << t;
    prev = e;
  }
}

TEST(InterSatellite, Cases) {
  ConstellationConfig c;
  c.rings = 1;
  c.sats_per_ring = 20;
  const auto snap = propagate(c, {}, 0, 10.0);
  EXPECT_TRUE(inter_satellite_visible(snap, "S0-0", "S0-0", 0.0));
  EXPECT_TRUE(inter_satellite_visible(snap, "S0-0", "S0-1", 0.0));
  EXPECT_FALSE(inter_satellite_visible(snap, "S0-0", "S0-10", 0.0));
  EXPECT_THROW(inter_satellite_visible(snap, "S0-0", "zz"), LookupError);
  for (int a = 0; a < 20; ++a) {
    for (int b = 0; b < 20; ++b) {
      const auto ia = "S0-" + std::to_string(a), ib = "S0-" + std::to_string(b);
      EXPECT_EQ(inter_satellite_visible(snap, ia, ib), inter_satellite_visible(snap, ib, ia));
    }
  }
}

TEST(InterSatellite, AntipodalAt500KmBlocked) {
  const double r = kRe + 500e3;
  EXPECT_FALSE(segment_clears_earth({r, 0, 0}, {-r, 0, 0}, kRe));
}

TEST(Geodesic, KnownDistances) {
  const GroundStation a{"a", 0, 0, 1}, b{"b", 0, 90, 1}, c{"c", 0, -180, 1};
  EXPECT_DOUBLE_EQ(geodesic_distance(a, a, kRe), 0.0);
  EXPECT_NEAR(geodesic_distance(a, b, kRe), 10007.5e3, 1e3);
  EXPECT_NEAR(geodesic_distance(a, c, kRe), kPi * kRe, 1e3);
}

TEST(Geodesic, MetricOnRandomTriples) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180);
  for (int k = 0; k < 200; ++k) {
    GroundStation p{"p", lat(rng), lon(rng), 1}, q{"q", lat(rng), lon(rng), 1}, r{"r", lat(rng), lon(rng), 1};
    const double pq = geodesic_distance(p, q, kRe);
    EXPECT_NEAR(pq, geodesic_distance(q, p, kRe), 1e-6);
    EXPECT_LE(pq, geodesic_distance(p, r, kRe) + geodesic_distance(r, q, kRe) + 1e-6);
    EXPECT_GT(pq, 0.0);
  }
}

TEST(OverheadArcs, ZeroBaselineCoincides) {
  const auto arcs = overhead_visibility_arcs(0.0, 1000e3, 20.0, kRe);
  EXPECT_DOUBLE_EQ(arcs.g1_left, arcs.g2_left);
  EXPECT_DOUBLE_EQ(arcs.g1_right, arcs.g2_right);
  EXPECT_DOUBLE_EQ(arcs.primary.start, arcs.g1_right);
  EXPECT_DOUBLE_EQ(arcs.primary.end, arcs.g1_left);
}

TEST(OverheadArcs, WideBaselineHasOnlyRelayArcs) {
  const auto arcs = overhead_visibility_arcs(5000e3, 1000e3, 20.0, kRe);
  EXPECT_TRUE(arcs.primary.empty());
  EXPECT_FALSE(arcs.reflection[0].empty());
  EXPECT_FALSE(arcs.reflection[1].empty());
}

TEST(OverheadArcs, SymmetricAboutMidpoint) {
  const auto arcs = overhead_visibility_arcs(1500e3, 1000e3, 20.0, kRe);
  EXPECT_NEAR(arcs.g1_left, -arcs.g2_right, 1e-12);
  EXPECT_NEAR(arcs.g1_right, -arcs.g2_left, 1e-12);
  EXPECT_NEAR(arcs.primary.start, -arcs.primary.end, 1e-12);
}

TEST(OverheadArcs, RejectsBadInputs) {
  EXPECT_THROW(overhead_visibility_arcs(-1.0, 1000e3, 20.0, kRe), ParameterError);
  EXPECT_THROW(overhead_visibility_arcs(0.0, 0.0, 20.0, kRe), ParameterError);
  EXPECT_THROW(overhead_visibility_arcs(0.0, 1000e3, 90.0, kRe), ParameterError);
}

// Dense sampling of the orbit angle against direct elevation evaluation.
TEST(OverheadArcs, PrimaryArcMatchesSampling) {
  for (double baseline : {0.0, 500e3, 1500e3, 2500e3, 3000e3}) {
    const double alt = 1000e3, theta = 20.0;
    const auto arcs = overhead_visibility_arcs(baseline, alt, theta, kRe);
    const double half = baseline / kRe / 2;
    const Vec3 g1{kRe * std::cos(-half), kRe * std::sin(-half), 0};
    const Vec3 g2{kRe * std::cos(half), kRe * std::sin(half), 0};
    auto sees_both = [&](double phi) {
      const Vec3 s{(kRe + alt) * std::cos(phi), (kRe + alt) * std::sin(phi), 0};
      return link_geometry(s, g1).elevation_deg >= theta - 1e-9 &&
             link_geometry(s, g2).elevation_deg >= theta - 1e-9;
    };
    for (int k = 0; k <= 4000; ++k) {
      const double phi = -1.0 + 2.0 * k / 4000.0;
      if (arcs.primary.contains(phi)) {
        EXPECT_TRUE(sees_both(phi)) << baseline << " " << phi;
      }
    }
    if (!arcs.primary.empty()) {
      EXPECT_FALSE(sees_both(arcs.primary.end + 1e-4));
      EXPECT_FALSE(sees_both(arcs.primary.start - 1e-4));
    }
  }
}
