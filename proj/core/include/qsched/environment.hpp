#pragma once

// Weather and time-of-day inputs: atmospheric transmissivity, cloud cover
// and sky irradiance per station, month and UTC hour.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "qsched/orbital.hpp"

namespace qsched {

struct WeatherRecord {
  std::string station_id;
  int month = 1;
  int hour_utc = 0;
  double zenith_transmissivity = 1.0;
  double cloud_cover = 0.0;
  double solar_irradiance = 0.0;  // uW cm^-2 sr^-1 nm^-1

  bool operator==(const WeatherRecord&) const = default;
};

// Throws IngestionError naming the offending field.
void validate(const WeatherRecord& record);

// Records keyed by (station, month, hour). Lookups resolve the hour to the
// nearest tabulated hour for that station and month (circular distance,
// ties go to the earlier hour); there is no interpolation.
class EnvironmentTable {
 public:
  using Key = std::tuple<std::string, int, int>;

  // Validates the record; duplicate keys throw IngestionError.
  void insert(WeatherRecord record);

  const WeatherRecord& lookup(const std::string& station_id, int month, double hour_utc) const;
  bool covers(const std::string& station_id, int month) const;

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  // Records in key order.
  std::vector<WeatherRecord> records() const;

  bool operator==(const EnvironmentTable& other) const { return records_ == other.records_; }

 private:
  std::map<Key, WeatherRecord> records_;
};

// eta_hat^sec(90 deg - elevation); zero at or below the horizon.
double atmospheric_transmissivity(double zenith_transmissivity, double elevation_deg);

// Secant-law transmissivity scaled by the expected clear fraction.
double effective_transmissivity(const WeatherRecord& record, double elevation_deg);

inline constexpr const char* kWeatherHeader =
    "station_id,month,hour_utc,zenith_transmissivity,cloud_cover,solar_irradiance_uW_cm2_sr_nm";

EnvironmentTable parse_weather(std::istream& in, const std::string& source_name = "<stream>");
EnvironmentTable load_weather(const std::filesystem::path& path);
void write_weather(const EnvironmentTable& table, std::ostream& out);
void save_weather(const EnvironmentTable& table, const std::filesystem::path& path);

// Local solar hour in [0, 24) from UTC hour and longitude.
double local_solar_hour(double hour_utc, double longitude_deg);

// Deterministic synthetic weather for every station, listed month and UTC
// hour 0..23. Zenith transmissivity dips in local summer (June in the north,
// December in the south), irradiance follows solar elevation and peaks in
// local summer, and night-time irradiance stays near zero.
EnvironmentTable synth_weather(std::uint64_t seed, const std::vector<GroundStation>& stations,
                               const std::vector<int>& months);

// Uniform conditions for every station, month and hour.
EnvironmentTable constant_weather(const std::vector<GroundStation>& stations,
                                  const std::vector<int>& months, double zenith_transmissivity,
                                  double cloud_cover, double solar_irradiance);

}  // namespace qsched
