#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "qsched/environment.hpp"
#include "qsched/error.hpp"

using namespace qsched;

namespace {

std::vector<GroundStation> stations() {
  return {{"NYC", 40.71, -74.01, 10}, {"SAO", -23.55, -46.63, 10}, {"TOK", 35.68, 139.69, 10}};
}

}  // namespace

TEST(Secant, Examples) {
  EXPECT_EQ(atmospheric_transmissivity(0.8, 90.0), 0.8);
  EXPECT_NEAR(atmospheric_transmissivity(0.8, 30.0), 0.64, 1e-12);
  EXPECT_EQ(atmospheric_transmissivity(1.0, 12.0), 1.0);
  EXPECT_EQ(atmospheric_transmissivity(0.8, 0.0), 0.0);
  EXPECT_EQ(atmospheric_transmissivity(0.8, -5.0), 0.0);
}

TEST(Secant, MonotoneInElevation) {
  double prev = 0.0;
  for (int e = 1; e <= 90; ++e) {
    const double v = atmospheric_transmissivity(0.7, e);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(Effective, CloudFactor) {
  WeatherRecord r{"A", 1, 0, 0.8, 0.5, 0.0};
  EXPECT_NEAR(effective_transmissivity(r, 30.0), 0.32, 1e-12);
  r.cloud_cover = 1.0;
  EXPECT_EQ(effective_transmissivity(r, 60.0), 0.0);
  r.cloud_cover = 0.0;
  EXPECT_EQ(effective_transmissivity(r, 60.0), atmospheric_transmissivity(0.8, 60.0));
}

TEST(Effective, Ordering) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    WeatherRecord r{"A", 1, 0, u(rng), u(rng), 0.0};
    const double e = 90 * u(rng);
    EXPECT_LE(effective_transmissivity(r, e), atmospheric_transmissivity(r.zenith_transmissivity, e));
    EXPECT_LE(atmospheric_transmissivity(r.zenith_transmissivity, e), r.zenith_transmissivity);
  }
}

TEST(Table, RejectsBadRecords) {
  EnvironmentTable t;
  EXPECT_THROW(t.insert({"A", 13, 0, 0.8, 0.0, 0.0}), IngestionError);
  EXPECT_THROW(t.insert({"A", 1, 24, 0.8, 0.0, 0.0}), IngestionError);
  EXPECT_THROW(t.insert({"A", 1, 0, 1.2, 0.0, 0.0}), IngestionError);
  EXPECT_THROW(t.insert({"A", 1, 0, 0.8, -0.1, 0.0}), IngestionError);
  EXPECT_THROW(t.insert({"A", 1, 0, 0.8, 0.0, -1.0}), IngestionError);
  t.insert({"A", 1, 0, 0.8, 0.0, 0.0});
  EXPECT_THROW(t.insert({"A", 1, 0, 0.7, 0.0, 0.0}), IngestionError);
}

TEST(Table, NearestHourLookup) {
  EnvironmentTable t;
  t.insert({"A", 1, 0, 0.5, 0, 0});
  t.insert({"A", 1, 6, 0.6, 0, 0});
  t.insert({"A", 1, 12, 0.7, 0, 0});
  EXPECT_EQ(t.lookup("A", 1, 2.0).zenith_transmissivity, 0.5);
  EXPECT_EQ(t.lookup("A", 1, 3.0).zenith_transmissivity, 0.5);
  EXPECT_EQ(t.lookup("A", 1, 4.0).zenith_transmissivity, 0.6);
  EXPECT_EQ(t.lookup("A", 1, 23.0).zenith_transmissivity, 0.5);
  EXPECT_TRUE(t.covers("A", 1));
  EXPECT_FALSE(t.covers("A", 2));
  EXPECT_THROW(t.lookup("B", 1, 0.0), IngestionError);
}

TEST(Csv, RoundTrip) {
  const auto table = synth_weather(42, stations(), {1, 6, 9});
  std::stringstream ss;
  write_weather(table, ss);
  EXPECT_EQ(parse_weather(ss), table);

  const auto path = std::filesystem::temp_directory_path() / "qsched_weather_roundtrip.csv";
  save_weather(table, path);
  EXPECT_EQ(load_weather(path), table);
  std::filesystem::remove(path);
}

TEST(Csv, MalformedRowsNameTheRow) {
  std::stringstream bad_header("a,b\n");
  EXPECT_THROW(parse_weather(bad_header), IngestionError);
  std::stringstream bad(std::string(kWeatherHeader) + "\nA,1,0,0.8,0.1,0.0\nA,1,1,x,0.1,0.0\n");
  try {
    parse_weather(bad, "w.csv");
    FAIL();
  } catch (const IngestionError& e) {
    EXPECT_NE(std::string(e.what()).find("3"), std::string::npos) << e.what();
  }
  std::stringstream short_row(std::string(kWeatherHeader) + "\nA,1,0,0.8\n");
  EXPECT_THROW(parse_weather(short_row), IngestionError);
  EXPECT_THROW(load_weather("/nonexistent/weather.csv"), IngestionError);
}

TEST(Synth, Deterministic) {
  EXPECT_EQ(synth_weather(1, stations(), {3, 9}), synth_weather(1, stations(), {3, 9}));
  EXPECT_FALSE(synth_weather(1, stations(), {3, 9}) == synth_weather(2, stations(), {3, 9}));
}

TEST(Synth, CoversEveryHour) {
  const auto t = synth_weather(3, stations(), {9});
  EXPECT_EQ(t.size(), 3u * 24u);
  for (const auto& r : t.records()) EXPECT_NO_THROW(validate(r));
}

TEST(Synth, NightDarkerThanNoon) {
  const auto s = stations();
  const auto t = synth_weather(5, s, {1, 6, 9, 12});
  for (const auto& g : s) {
    for (int month : {1, 6, 9, 12}) {
      // UTC hour at which local solar time is 00 and 12
      const double midnight = std::fmod(24.0 + 24.0 - g.longitude_deg / 15.0, 24.0);
      const double noon = std::fmod(24.0 + 12.0 - g.longitude_deg / 15.0, 24.0);
      EXPECT_LT(t.lookup(g.id, month, midnight).solar_irradiance, t.lookup(g.id, month, noon).solar_irradiance)
          << g.id << " " << month;
    }
  }
}

TEST(Synth, HemisphereSeasons) {
  const auto s = stations();
  const auto t = synth_weather(8, s, {6, 12});
  auto mean = [&](const std::string& id, int month, bool irr) {
    double sum = 0.0;
    for (int h = 0; h < 24; ++h) {
      const auto& r = t.lookup(id, month, h);
      sum += irr ? r.solar_irradiance : r.zenith_transmissivity;
    }
    return sum / 24;
  };
  EXPECT_LT(mean("NYC", 6, false), mean("NYC", 12, false));
  EXPECT_GT(mean("NYC", 6, true), mean("NYC", 12, true));
  EXPECT_GT(mean("SAO", 6, false), mean("SAO", 12, false));
  EXPECT_LT(mean("SAO", 6, true), mean("SAO", 12, true));
}

TEST(LocalTime, Wraps) {
  EXPECT_NEAR(local_solar_hour(0.0, 0.0), 0.0, 1e-12);
  EXPECT_NEAR(local_solar_hour(0.0, -90.0), 18.0, 1e-12);
  EXPECT_NEAR(local_solar_hour(23.0, 30.0), 1.0, 1e-12);
}
