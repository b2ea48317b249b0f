#include "qsched/environment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "qsched/error.hpp"

namespace qsched {
namespace {

constexpr const char* kComponent = "environment";

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

template <typename T>
T parse_number(const std::string& text, const std::string& where, const char* field) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty())
    throw IngestionError(kComponent, where + ": field " + field + " is not a number: '" + text + "'");
  return value;
}

}  // namespace

void validate(const WeatherRecord& r) {
  const std::string who = "weather record (" + r.station_id + ", month " + std::to_string(r.month) +
                          ", hour " + std::to_string(r.hour_utc) + ")";
  if (r.station_id.empty()) throw IngestionError(kComponent, who + ": empty station_id");
  if (r.month < 1 || r.month > 12) throw IngestionError(kComponent, who + ": month out of 1..12");
  if (r.hour_utc < 0 || r.hour_utc > 23) throw IngestionError(kComponent, who + ": hour_utc out of 0..23");
  if (!(r.zenith_transmissivity >= 0.0 && r.zenith_transmissivity <= 1.0))
    throw IngestionError(kComponent, who + ": zenith_transmissivity out of [0, 1]");
  if (!(r.cloud_cover >= 0.0 && r.cloud_cover <= 1.0))
    throw IngestionError(kComponent, who + ": cloud_cover out of [0, 1]");
  if (!(r.solar_irradiance >= 0.0) || !std::isfinite(r.solar_irradiance))
    throw IngestionError(kComponent, who + ": solar_irradiance must be nonnegative");
}

void EnvironmentTable::insert(WeatherRecord record) {
  validate(record);
  Key key{record.station_id, record.month, record.hour_utc};
  auto [it, inserted] = records_.emplace(std::move(key), std::move(record));
  if (!inserted) {
    const auto& r = it->second;
    throw IngestionError(kComponent, "duplicate weather record (" + r.station_id + ", month " +
                                         std::to_string(r.month) + ", hour " +
                                         std::to_string(r.hour_utc) + ")");
  }
}

bool EnvironmentTable::covers(const std::string& station_id, int month) const {
  auto it = records_.lower_bound({station_id, month, 0});
  return it != records_.end() && std::get<0>(it->first) == station_id &&
         std::get<1>(it->first) == month;
}

const WeatherRecord& EnvironmentTable::lookup(const std::string& station_id, int month,
                                              double hour_utc) const {
  const double hour = std::fmod(std::fmod(hour_utc, 24.0) + 24.0, 24.0);
  const WeatherRecord* best = nullptr;
  double best_dist = 0.0;
  for (auto it = records_.lower_bound({station_id, month, 0});
       it != records_.end() && std::get<0>(it->first) == station_id &&
       std::get<1>(it->first) == month;
       ++it) {
    const double diff = std::abs(hour - it->second.hour_utc);
    const double dist = std::min(diff, 24.0 - diff);
    if (best == nullptr || dist < best_dist) {
      best = &it->second;
      best_dist = dist;
    }
  }
  if (best == nullptr)
    throw IngestionError(kComponent, "missing weather record for station " + station_id +
                                         ", month " + std::to_string(month));
  return *best;
}

std::vector<WeatherRecord> EnvironmentTable::records() const {
  std::vector<WeatherRecord> out;
  out.reserve(records_.size());
  for (const auto& [key, rec] : records_) out.push_back(rec);
  return out;
}

double atmospheric_transmissivity(double zenith_transmissivity, double elevation_deg) {
  if (elevation_deg <= 0.0) return 0.0;
  if (elevation_deg >= 90.0) return zenith_transmissivity;
  // sec(90 - e) = 1 / sin(e)
  return std::pow(zenith_transmissivity, 1.0 / std::sin(deg2rad(elevation_deg)));
}

double effective_transmissivity(const WeatherRecord& record, double elevation_deg) {
  return atmospheric_transmissivity(record.zenith_transmissivity, elevation_deg) *
         (1.0 - record.cloud_cover);
}

EnvironmentTable parse_weather(std::istream& in, const std::string& source_name) {
  EnvironmentTable table;
  std::string line;
  if (!std::getline(in, line)) throw IngestionError(kComponent, source_name + ": empty weather file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kWeatherHeader)
    throw IngestionError(kComponent, source_name + ": line 1: header must be '" +
                                         std::string(kWeatherHeader) + "'");
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = source_name + ": line " + std::to_string(line_no);
    const auto f = split_csv(line);
    if (f.size() != 6)
      throw IngestionError(kComponent, where + ": expected 6 fields, got " + std::to_string(f.size()));
    WeatherRecord r;
    r.station_id = f[0];
    r.month = parse_number<int>(f[1], where, "month");
    r.hour_utc = parse_number<int>(f[2], where, "hour_utc");
    r.zenith_transmissivity = parse_number<double>(f[3], where, "zenith_transmissivity");
    r.cloud_cover = parse_number<double>(f[4], where, "cloud_cover");
    r.solar_irradiance = parse_number<double>(f[5], where, "solar_irradiance_uW_cm2_sr_nm");
    try {
      table.insert(std::move(r));
    } catch (const IngestionError& e) {
      throw IngestionError(kComponent, where + ": " + e.what());
    }
  }
  return table;
}

EnvironmentTable load_weather(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError(kComponent, "cannot open weather file " + path.string());
  return parse_weather(in, path.string());
}

void write_weather(const EnvironmentTable& table, std::ostream& out) {
  out << kWeatherHeader << '\n';
  for (const auto& r : table.records()) {
    out << r.station_id << ',' << r.month << ',' << r.hour_utc << ','
        << format_double(r.zenith_transmissivity) << ',' << format_double(r.cloud_cover) << ','
        << format_double(r.solar_irradiance) << '\n';
  }
}

void save_weather(const EnvironmentTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestionError(kComponent, "cannot write weather file " + path.string());
  write_weather(table, out);
}

double local_solar_hour(double hour_utc, double longitude_deg) {
  const double h = std::fmod(hour_utc + longitude_deg / 15.0, 24.0);
  return h < 0.0 ? h + 24.0 : h;
}

EnvironmentTable synth_weather(std::uint64_t seed, const std::vector<GroundStation>& stations,
                               const std::vector<int>& months) {
  EnvironmentTable table;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (const auto& gs : stations) {
    validate(gs);
    // Per-station climate.
    const double base_eta = 0.72 + 0.14 * unit(rng);
    const double base_cloud = 0.05 + 0.35 * unit(rng);
    const double peak_irradiance = 2.0 + 8.0 * unit(rng);
    const double night_irradiance = 1e-4 + 2e-4 * unit(rng);
    const double hemisphere = gs.latitude_deg >= 0.0 ? 1.0 : -1.0;
    const double lat = deg2rad(gs.latitude_deg);

    for (int month : months) {
      if (month < 1 || month > 12) throw IngestionError(kComponent, "synthetic month out of 1..12");
      // +1 in June, -1 in December.
      const double season = std::cos(2.0 * kPi * (month - 6) / 12.0);
      const double day_of_year = 30.4 * (month - 1) + 15.0;
      const double declination = deg2rad(23.44) * std::sin(2.0 * kPi * (day_of_year - 81.0) / 365.0);
      const double month_eta = base_eta - 0.08 * hemisphere * season;
      const double month_cloud = base_cloud + 0.1 * (unit(rng) - 0.5);

      for (int hour = 0; hour < 24; ++hour) {
        const double local = local_solar_hour(hour, gs.longitude_deg);
        const double hour_angle = deg2rad(15.0 * (local - 12.0));
        const double sin_sun = std::sin(lat) * std::sin(declination) +
                               std::cos(lat) * std::cos(declination) * std::cos(hour_angle);
        const double jitter = 1.0 + 0.1 * (unit(rng) - 0.5);

        WeatherRecord r;
        r.station_id = gs.id;
        r.month = month;
        r.hour_utc = hour;
        r.zenith_transmissivity = std::clamp(month_eta + 0.02 * (unit(rng) - 0.5), 0.05, 0.99);
        r.cloud_cover = std::clamp(month_cloud + 0.1 * (unit(rng) - 0.5), 0.0, 1.0);
        // Sunlit sky plus a faint floor that still tracks the hour angle, so
        // local noon always outshines local midnight.
        r.solar_irradiance =
            jitter * (peak_irradiance * std::max(0.0, sin_sun) +
                      night_irradiance * (1.0 + 0.5 * std::cos(hour_angle)));
        table.insert(std::move(r));
      }
    }
  }
  return table;
}

EnvironmentTable constant_weather(const std::vector<GroundStation>& stations,
                                  const std::vector<int>& months, double zenith_transmissivity,
                                  double cloud_cover, double solar_irradiance) {
  EnvironmentTable table;
  for (const auto& gs : stations) {
    for (int month : months) {
      for (int hour = 0; hour < 24; ++hour) {
        table.insert({gs.id, month, hour, zenith_transmissivity, cloud_cover, solar_irradiance});
      }
    }
  }
  return table;
}

}  // namespace qsched
