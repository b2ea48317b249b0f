#include "qsched/orbital.hpp"

#include <algorithm>
#include <cmath>

#include "qsched/error.hpp"

namespace qsched {
namespace {

constexpr const char* kComponent = "orbital";

Vec3 rotate_z(const Vec3& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

double earth_angle(double elapsed_s, double period_s) {
  return 2.0 * kPi * std::fmod(elapsed_s / period_s, 1.0);
}

}  // namespace

void validate(const ConstellationConfig& config) {
  auto require = [](bool ok, const char* field) {
    if (!ok) throw ConfigError(kComponent, std::string("constellation.") + field + " must be positive");
  };
  require(config.rings > 0, "rings");
  require(config.sats_per_ring > 0, "sats_per_ring");
  require(config.altitude_m > 0.0, "altitude");
  require(config.earth_radius_m > 0.0, "earth_radius");
  require(config.earth_rotation_period_s > 0.0, "earth_rotation_period");
  require(config.gravitational_parameter > 0.0, "gravitational_parameter");
  if (!(config.epoch_s >= 0.0)) throw ConfigError(kComponent, "constellation.epoch must be nonnegative");
}

double orbital_period(const ConstellationConfig& config) {
  const double a = config.earth_radius_m + config.altitude_m;
  return 2.0 * kPi * std::sqrt(a * a * a / config.gravitational_parameter);
}

std::vector<SatelliteSpec> make_satellites(const ConstellationConfig& config,
                                           int transmitter_cap,
                                           int reflector_cap) {
  validate(config);
  if (transmitter_cap < 0 || reflector_cap < 0)
    throw ConfigError(kComponent, "satellite capacities must be nonnegative");
  std::vector<SatelliteSpec> sats;
  sats.reserve(static_cast<std::size_t>(config.rings) * config.sats_per_ring);
  for (int r = 0; r < config.rings; ++r) {
    for (int s = 0; s < config.sats_per_ring; ++s) {
      sats.push_back({"S" + std::to_string(r) + "-" + std::to_string(s), r, s,
                      config.altitude_m, transmitter_cap, reflector_cap});
    }
  }
  return sats;
}

void validate(const GroundStation& station) {
  if (station.id.empty()) throw ConfigError(kComponent, "station id must be nonempty");
  if (!(station.latitude_deg >= -90.0 && station.latitude_deg <= 90.0))
    throw ConfigError(kComponent, "station " + station.id + ": latitude out of [-90, 90]");
  if (!(station.longitude_deg >= -180.0 && station.longitude_deg < 180.0))
    throw ConfigError(kComponent, "station " + station.id + ": longitude out of [-180, 180)");
  if (station.receiver_cap < 0)
    throw ConfigError(kComponent, "station " + station.id + ": receiver_cap must be nonnegative");
}

Vec3 station_position(const GroundStation& station, double earth_radius_m) {
  const double lat = deg2rad(station.latitude_deg);
  const double lon = deg2rad(station.longitude_deg);
  return {earth_radius_m * std::cos(lat) * std::cos(lon),
          earth_radius_m * std::cos(lat) * std::sin(lon),
          earth_radius_m * std::sin(lat)};
}

std::array<double, 2> subpoint(const Vec3& position, double elapsed_s,
                               double earth_rotation_period_s) {
  const Vec3 fixed = rotate_z(position, -earth_angle(elapsed_s, earth_rotation_period_s));
  const double r = fixed.norm();
  return {rad2deg(std::asin(fixed.z / r)), rad2deg(std::atan2(fixed.y, fixed.x))};
}

ConstellationSnapshot::ConstellationSnapshot(int time, double elapsed_s,
                                             double earth_radius_m,
                                             std::vector<std::string> sat_ids,
                                             std::vector<Vec3> sat_positions,
                                             std::vector<std::string> gs_ids,
                                             std::vector<Vec3> gs_positions)
    : time_(time),
      elapsed_s_(elapsed_s),
      earth_radius_m_(earth_radius_m),
      sat_ids_(std::move(sat_ids)),
      sat_positions_(std::move(sat_positions)),
      gs_ids_(std::move(gs_ids)),
      gs_positions_(std::move(gs_positions)) {
  if (sat_ids_.size() != sat_positions_.size() || gs_ids_.size() != gs_positions_.size())
    throw StructuralError(kComponent, "snapshot id/position count mismatch");
  for (std::size_t i = 0; i < sat_ids_.size(); ++i) {
    if (!sat_index_.emplace(sat_ids_[i], i).second)
      throw ConfigError(kComponent, "duplicate satellite id " + sat_ids_[i]);
  }
  for (std::size_t g = 0; g < gs_ids_.size(); ++g) {
    if (!gs_index_.emplace(gs_ids_[g], g).second)
      throw ConfigError(kComponent, "duplicate station id " + gs_ids_[g]);
  }
}

std::size_t ConstellationSnapshot::satellite_index(std::string_view id) const {
  auto it = sat_index_.find(std::string(id));
  if (it == sat_index_.end()) throw LookupError(kComponent, "unknown satellite id " + std::string(id));
  return it->second;
}

std::size_t ConstellationSnapshot::station_index(std::string_view id) const {
  auto it = gs_index_.find(std::string(id));
  if (it == gs_index_.end()) throw LookupError(kComponent, "unknown station id " + std::string(id));
  return it->second;
}

ConstellationSnapshot propagate(const ConstellationConfig& config,
                                const std::vector<GroundStation>& stations,
                                int t, double slot_duration_s) {
  validate(config);
  if (t < 0) throw ParameterError(kComponent, "slot index must be nonnegative");
  if (!(slot_duration_s > 0.0)) throw ParameterError(kComponent, "slot duration must be positive");

  const double elapsed = config.epoch_s + static_cast<double>(t) * slot_duration_s;
  const double radius = config.earth_radius_m + config.altitude_m;
  const double period = orbital_period(config);
  // Keep the mean-anomaly argument small so long runs stay accurate.
  const double advance = 2.0 * kPi * std::fmod(elapsed / period, 1.0);
  const int n = config.sats_per_ring;
  const int rings = config.rings;

  std::vector<std::string> sat_ids;
  std::vector<Vec3> sat_pos;
  sat_ids.reserve(static_cast<std::size_t>(rings) * n);
  sat_pos.reserve(sat_ids.capacity());
  for (int r = 0; r < rings; ++r) {
    const double node = r * kPi / rings;
    const double ring_offset = r * 2.0 * kPi / (static_cast<double>(rings) * n);
    const double cn = std::cos(node);
    const double sn = std::sin(node);
    for (int s = 0; s < n; ++s) {
      const double u = 2.0 * kPi * s / n + ring_offset + advance;
      const double cu = std::cos(u);
      sat_ids.push_back("S" + std::to_string(r) + "-" + std::to_string(s));
      sat_pos.push_back({radius * cu * cn, radius * cu * sn, radius * std::sin(u)});
    }
  }

  const double spin = earth_angle(elapsed, config.earth_rotation_period_s);
  std::vector<std::string> gs_ids;
  std::vector<Vec3> gs_pos;
  gs_ids.reserve(stations.size());
  gs_pos.reserve(stations.size());
  for (const auto& gs : stations) {
    validate(gs);
    gs_ids.push_back(gs.id);
    gs_pos.push_back(rotate_z(station_position(gs, config.earth_radius_m), spin));
  }
  return ConstellationSnapshot(t, elapsed, config.earth_radius_m, std::move(sat_ids),
                               std::move(sat_pos), std::move(gs_ids), std::move(gs_pos));
}

LinkGeometry link_geometry(const Vec3& satellite, const Vec3& station,
                           double atmosphere_height_m) {
  const Vec3 d = satellite - station;
  const double s = d.norm();
  const double radius = station.norm();
  LinkGeometry geo;
  geo.slant_range_m = s;
  if (s == 0.0) {
    geo.elevation_deg = 90.0;
    return geo;
  }
  const double sin_e = std::clamp(d.dot(station) / (radius * s), -1.0, 1.0);
  geo.elevation_deg = rad2deg(std::asin(sin_e));
  // Distance along the ray until it reaches radius + atmosphere_height.
  const double h = atmosphere_height_m;
  const double along = -radius * sin_e +
                       std::sqrt(radius * radius * sin_e * sin_e + 2.0 * radius * h + h * h);
  geo.atmospheric_path_m = std::min(along, s);
  return geo;
}

LinkGeometry link_geometry(const ConstellationSnapshot& snapshot,
                           std::string_view sat, std::string_view gs,
                           double atmosphere_height_m) {
  return link_geometry(snapshot.satellite_position(sat), snapshot.station_position(gs),
                       atmosphere_height_m);
}

bool segment_clears_earth(const Vec3& a, const Vec3& b, double min_radius_m) {
  const Vec3 ab = b - a;
  const double len2 = ab.dot(ab);
  double tau = 0.0;
  if (len2 > 0.0) tau = std::clamp(-a.dot(ab) / len2, 0.0, 1.0);
  return (a + ab * tau).norm() >= min_radius_m;
}

bool inter_satellite_visible(const ConstellationSnapshot& snapshot,
                             std::string_view sat_a, std::string_view sat_b,
                             double clearance_m) {
  return segment_clears_earth(snapshot.satellite_position(sat_a),
                              snapshot.satellite_position(sat_b),
                              snapshot.earth_radius_m() + clearance_m);
}

double geodesic_distance(const GroundStation& a, const GroundStation& b,
                         double earth_radius_m) {
  const double lat1 = deg2rad(a.latitude_deg);
  const double lat2 = deg2rad(b.latitude_deg);
  const double dlat = lat2 - lat1;
  const double dlon = deg2rad(b.longitude_deg - a.longitude_deg);
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(lat1) * std::cos(lat2) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * earth_radius_m * std::asin(std::min(1.0, std::sqrt(h)));
}

double horizon_central_angle(double altitude_m, double elevation_deg,
                             double earth_radius_m) {
  const double e = deg2rad(elevation_deg);
  return std::acos(earth_radius_m * std::cos(e) / (earth_radius_m + altitude_m)) - e;
}

OverheadArcs overhead_visibility_arcs(double baseline_m, double altitude_m,
                                      double min_elevation_deg,
                                      double earth_radius_m) {
  if (!(baseline_m >= 0.0)) throw ParameterError(kComponent, "baseline must be nonnegative");
  if (!(altitude_m > 0.0)) throw ParameterError(kComponent, "altitude must be positive");
  if (!(min_elevation_deg >= 0.0 && min_elevation_deg < 90.0))
    throw ParameterError(kComponent, "minimum elevation must lie in [0, 90)");

  const double half = 0.5 * baseline_m / earth_radius_m;
  const double reach = horizon_central_angle(altitude_m, min_elevation_deg, earth_radius_m);

  OverheadArcs arcs;
  arcs.g1_left = -half + reach;
  arcs.g1_right = -half - reach;
  arcs.g2_left = half + reach;
  arcs.g2_right = half - reach;
  arcs.primary = {arcs.g2_right, arcs.g1_left};
  arcs.reflection[0] = {arcs.g1_right, std::min(arcs.g1_left, arcs.g2_right)};
  arcs.reflection[1] = {std::max(arcs.g2_right, arcs.g1_left), arcs.g2_left};
  return arcs;
}

}  // namespace qsched
