#pragma once

// Per-slot scheduling: building satellite x pair weight structures from
// geometry, physics and weather, and solving the rate-sum, max-min fair and
// reflection-relay assignment policies.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qsched/environment.hpp"
#include "qsched/ilp.hpp"
#include "qsched/linkphys.hpp"
#include "qsched/orbital.hpp"

namespace qsched {

template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<T>& values() const { return data_; }

  bool operator==(const Grid&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

struct PairSpec {
  std::string id;
  std::string station_a;
  std::string station_b;
  int pair_cap = 10;

  bool operator==(const PairSpec&) const = default;
};

// Every unordered station pair, in station order; ids are "a|b".
std::vector<PairSpec> all_station_pairs(const std::vector<GroundStation>& stations, int pair_cap);

enum class Policy {
  kPrimaryRatesum,
  kPrimaryRatefair,
  kReflectionRatesum,
  kReflectionRatefair,
  kStsr,
  kStmr,
};

const char* to_string(Policy policy);
// Accepts the names produced by to_string; throws ConfigError otherwise.
Policy parse_policy(std::string_view name);
bool uses_reflection(Policy policy);

// One relayed configuration: `source` sends directly to the pair's first
// station and via mirror satellite `relay` to the second.
struct ReflectionEntry {
  int source = 0;
  int relay = 0;
  int pair = 0;
  double rate = 0.0;
  double fidelity = 0.0;

  bool operator==(const ReflectionEntry&) const = default;
};

struct SlotInstance {
  int time = 0;
  std::vector<std::string> satellite_ids;
  std::vector<std::string> station_ids;
  std::vector<std::string> pair_ids;
  std::vector<std::array<int, 2>> pair_stations;

  Grid<double> omega;     // satellites x pairs, ebits/s
  Grid<double> fidelity;  // satellites x pairs, diagnostic

  bool reflection_mode = false;
  // Positive relay rates only, sorted by (source, relay, pair).
  std::vector<ReflectionEntry> nu;

  std::vector<int> sat_caps;        // T_i
  std::vector<int> gs_caps;         // R_g
  std::vector<int> pair_caps;       // L_j
  std::vector<int> reflector_caps;  // U_k

  std::size_t satellite_count() const { return satellite_ids.size(); }
  std::size_t station_count() const { return station_ids.size(); }
  std::size_t pair_count() const { return pair_ids.size(); }

  double nu_at(int source, int relay, int pair) const;
};

// Throws StructuralError on inconsistent dimensions, ConfigError when a
// station's receiver cap is below the cap of a pair it belongs to.
void validate(const SlotInstance& instance);

// Convenience constructor for hand-built instances; ids are generated
// ("S0", "G0", "P0", ...). Reflector caps default to zero.
SlotInstance make_instance(const Grid<double>& omega,
                           const std::vector<std::array<int, 2>>& pair_stations,
                           std::vector<int> sat_caps, std::vector<int> gs_caps,
                           std::vector<int> pair_caps, std::vector<int> reflector_caps = {});

struct LinkParams {
  OpticsParams optics;
  SourceParams source;
  DetectorParams detector;
  double min_elevation_deg = 20.0;
  double fidelity_threshold = 0.85;
  double atmosphere_height_m = kDefaultAtmosphereHeight;
  double isl_clearance_m = kDefaultIslClearance;
  double mirror_efficiency = 0.95;

  bool operator==(const LinkParams&) const = default;
};

struct NetworkSpec {
  std::vector<SatelliteSpec> satellites;
  std::vector<GroundStation> stations;
  std::vector<PairSpec> pairs;
};

// Throws ConfigError for duplicate ids, unknown or identical pair stations,
// and pairs whose cap exceeds one of their stations' receiver caps.
void validate(const NetworkSpec& network);

// Budget of one satellite-station downlink at a slot.
struct DownlinkBudget {
  double elevation_deg = 0.0;
  double slant_range_m = 0.0;
  ArmChannel arm;
};

DownlinkBudget downlink_budget(const Vec3& satellite, const Vec3& station,
                               const WeatherRecord& weather, const LinkParams& params);

// Rate/fidelity gate: ebits/s when the fidelity clears the threshold and
// both elevations clear the minimum, else 0.
double gated_rate(const PairOutcome& outcome, double elevation_a, double elevation_b,
                  const LinkParams& params);

SlotInstance build_weights(const ConstellationSnapshot& snapshot, const NetworkSpec& network,
                           const LinkParams& params, const EnvironmentTable& weather, int month);

// build_weights plus the relay tensor.
SlotInstance build_reflection_weights(const ConstellationSnapshot& snapshot,
                                      const NetworkSpec& network, const LinkParams& params,
                                      const EnvironmentTable& weather, int month);

struct ReflectionConnection {
  int source = 0;
  int relay = 0;
  int pair = 0;
  int count = 0;

  bool operator==(const ReflectionConnection&) const = default;
};

struct Allocation {
  int time = 0;
  Policy policy = Policy::kPrimaryRatesum;
  Grid<int> x;                          // satellites x pairs
  std::vector<ReflectionConnection> y;  // nonzero entries, sorted
  double objective = 0.0;               // aggregate ebits/s
  ilp::SolveStatus status = ilp::SolveStatus::kOptimal;

  int y_at(int source, int relay, int pair) const;
};

struct SolverOptions {
  ilp::MipOptions mip;
  int mwis_vertex_limit = 512;
  // Relative slack when picking the pairs at the max-min level.
  double saturation_tolerance = 1e-6;
};

// Weights of the max-min objective: one per x cell and one per nu entry.
struct FairWeights {
  Grid<double> x;
  std::vector<double> y;
};

Allocation solve_primary_ratesum(const SlotInstance& instance, const SolverOptions& options = {});
Allocation solve_reflection_ratesum(const SlotInstance& instance, const SolverOptions& options = {});

struct MaxMinResult {
  Allocation allocation;
  double minimum = 0.0;
};

// Maximises the smallest weighted rate over pairs that have any positive
// weight. Reflection terms take part iff the weights carry them.
MaxMinResult solve_one_shot_maxmin(const SlotInstance& instance, const FairWeights& weights,
                                   const SolverOptions& options = {});
MaxMinResult solve_one_shot_maxmin(const SlotInstance& instance, const Grid<double>& weights,
                                   const SolverOptions& options = {});

// Best rate pair j could get with the whole network to itself; reflection
// terms count iff the instance is in reflection mode.
double uncontended_max_edr(const SlotInstance& instance, int pair, const SolverOptions& options = {});
std::vector<double> uncontended_max_edr(const SlotInstance& instance, const SolverOptions& options = {});

Grid<double> fractional_weights(const Grid<double>& omega, const std::vector<double>& best_rates);
FairWeights fractional_weights(const SlotInstance& instance, const std::vector<double>& best_rates);

Allocation solve_primary_ratefair(const SlotInstance& instance, const SolverOptions& options = {});
Allocation solve_reflection_ratefair(const SlotInstance& instance, const SolverOptions& options = {});

// Single transmitter, single receiver (all caps 1): independent set on the
// conflict graph. Throws ModeError when the caps do not conform.
Allocation solve_stsr(const SlotInstance& instance, const SolverOptions& options = {});

// Receiver caps never binding (R_g >= min(sum T_i, sum of L_j over pairs
// containing g)): bipartite matching on satellite/pair copies. Throws
// ModeError otherwise.
Allocation solve_stmr(const SlotInstance& instance, const SolverOptions& options = {});

Allocation solve(const SlotInstance& instance, Policy policy, const SolverOptions& options = {});

// Rate delivered to each pair by an allocation (direct plus relayed).
std::vector<double> per_pair_edr(const SlotInstance& instance, const Allocation& allocation);

// Smallest sum_i f_ij x_ij (+ relay terms) over pairs with a positive best
// rate; 0 when there are none.
double min_fractional_edr(const SlotInstance& instance, const Allocation& allocation,
                          const std::vector<double>& best_rates);

// Human-readable list of violated capacity constraints, checked directly on
// the integer allocation. Empty when feasible.
std::vector<std::string> allocation_violations(const SlotInstance& instance,
                                               const Allocation& allocation);

// {t, policy, x, y, objective, per_pair_edr}; y is dense
// satellites x satellites x pairs.
std::string allocation_to_json(const SlotInstance& instance, const Allocation& allocation);

}  // namespace qsched
