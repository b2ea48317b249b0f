#pragma once

// Circular polar-constellation geometry over a spherical rotating Earth.

#include <array>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qsched/vec3.hpp"

namespace qsched {

inline constexpr double kPi = 3.14159265358979323846;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

struct GroundStation {
  std::string id;
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;
  int receiver_cap = 10;

  bool operator==(const GroundStation&) const = default;
};

struct SatelliteSpec {
  std::string id;
  int ring_index = 0;
  int slot_index = 0;
  double altitude_m = 0.0;
  int transmitter_cap = 10;
  int reflector_cap = 10;

  bool operator==(const SatelliteSpec&) const = default;
};

struct ConstellationConfig {
  int rings = 20;
  int sats_per_ring = 20;
  double altitude_m = 1000e3;
  double epoch_s = 0.0;
  double earth_radius_m = 6371e3;
  double earth_rotation_period_s = 86400.0;
  double gravitational_parameter = 3.986004418e14;

  bool operator==(const ConstellationConfig&) const = default;
};

// Throws ConfigError on non-positive fields.
void validate(const ConstellationConfig& config);

// Kepler's third law for the circular orbit radius earth_radius + altitude.
double orbital_period(const ConstellationConfig& config);

// Satellite roster in ring-major order; ids are "S<ring>-<slot>".
std::vector<SatelliteSpec> make_satellites(const ConstellationConfig& config,
                                           int transmitter_cap,
                                           int reflector_cap);

void validate(const GroundStation& station);

// Station position on the non-rotating sphere (latitude/longitude at t = 0).
Vec3 station_position(const GroundStation& station, double earth_radius_m);

// Geographic latitude/longitude (degrees) of the point below `position`
// in the Earth-fixed frame at the given elapsed time.
std::array<double, 2> subpoint(const Vec3& position, double elapsed_s,
                               double earth_rotation_period_s);

// All satellite and station positions at one slot, in an inertial frame
// whose axes coincide with the Earth-fixed frame at elapsed time zero.
class ConstellationSnapshot {
 public:
  ConstellationSnapshot() = default;
  ConstellationSnapshot(int time, double elapsed_s, double earth_radius_m,
                        std::vector<std::string> sat_ids,
                        std::vector<Vec3> sat_positions,
                        std::vector<std::string> gs_ids,
                        std::vector<Vec3> gs_positions);

  int time() const { return time_; }
  double elapsed_s() const { return elapsed_s_; }
  double earth_radius_m() const { return earth_radius_m_; }

  std::size_t satellite_count() const { return sat_ids_.size(); }
  std::size_t station_count() const { return gs_ids_.size(); }

  const std::vector<std::string>& satellite_ids() const { return sat_ids_; }
  const std::vector<std::string>& station_ids() const { return gs_ids_; }

  // Throw LookupError for unknown ids.
  std::size_t satellite_index(std::string_view id) const;
  std::size_t station_index(std::string_view id) const;

  const Vec3& satellite_position(std::size_t i) const { return sat_positions_.at(i); }
  const Vec3& station_position(std::size_t g) const { return gs_positions_.at(g); }
  const Vec3& satellite_position(std::string_view id) const {
    return sat_positions_[satellite_index(id)];
  }
  const Vec3& station_position(std::string_view id) const {
    return gs_positions_[station_index(id)];
  }

 private:
  int time_ = 0;
  double elapsed_s_ = 0.0;
  double earth_radius_m_ = 0.0;
  std::vector<std::string> sat_ids_;
  std::vector<Vec3> sat_positions_;
  std::vector<std::string> gs_ids_;
  std::vector<Vec3> gs_positions_;
  std::unordered_map<std::string, std::size_t> sat_index_;
  std::unordered_map<std::string, std::size_t> gs_index_;
};

// Positions at slot t, i.e. elapsed time epoch + t * slot_duration.
ConstellationSnapshot propagate(const ConstellationConfig& config,
                                const std::vector<GroundStation>& stations,
                                int t, double slot_duration_s);

struct LinkGeometry {
  double elevation_deg = 0.0;
  double slant_range_m = 0.0;
  double atmospheric_path_m = 0.0;
};

inline constexpr double kDefaultAtmosphereHeight = 20e3;
inline constexpr double kDefaultIslClearance = 100e3;

// Geometry of the line from a surface station to a satellite. The station
// must lie on the sphere of radius |station|.
LinkGeometry link_geometry(const Vec3& satellite, const Vec3& station,
                           double atmosphere_height_m = kDefaultAtmosphereHeight);

LinkGeometry link_geometry(const ConstellationSnapshot& snapshot,
                           std::string_view sat, std::string_view gs,
                           double atmosphere_height_m = kDefaultAtmosphereHeight);

// True iff every point of the segment a-b stays at least
// earth_radius + clearance from the Earth's center.
bool segment_clears_earth(const Vec3& a, const Vec3& b, double min_radius_m);

bool inter_satellite_visible(const ConstellationSnapshot& snapshot,
                             std::string_view sat_a, std::string_view sat_b,
                             double clearance_m = kDefaultIslClearance);

// Great-circle distance (haversine).
double geodesic_distance(const GroundStation& a, const GroundStation& b,
                         double earth_radius_m);

// Earth central angle between a station and the sub-satellite point at
// which the satellite (orbit radius earth_radius + altitude) sits exactly
// at `elevation_deg` above the horizon.
double horizon_central_angle(double altitude_m, double elevation_deg,
                             double earth_radius_m);

// Closed interval of orbit angles [start, end] in radians; empty when
// end <= start.
struct OrbitArc {
  double start = 0.0;
  double end = 0.0;

  bool empty() const { return !(end > start); }
  double length() const { return empty() ? 0.0 : end - start; }
  bool contains(double angle) const { return !empty() && angle >= start && angle <= end; }
};

// Visibility arcs for the coplanar ("overhead orbit") case. Orbit angles
// are measured counter-clockwise in the common plane, with station 1 at
// -baseline/(2R) and station 2 at +baseline/(2R). A station's left endpoint
// is on its counter-clockwise side.
struct OverheadArcs {
  double g1_left = 0.0;
  double g1_right = 0.0;
  double g2_left = 0.0;
  double g2_right = 0.0;
  // Both stations see the satellite: (g2_right, g1_left).
  OrbitArc primary;
  // Station-exclusive arcs: [0] seen only by station 1 (towards g1_right),
  // [1] seen only by station 2 (towards g2_left). When the stations share
  // an overlap these are (g1_right, g2_right) and (g1_left, g2_left).
  std::array<OrbitArc, 2> reflection;
};

OverheadArcs overhead_visibility_arcs(double baseline_m, double altitude_m,
                                      double min_elevation_deg,
                                      double earth_radius_m);

}  // namespace qsched
