#pragma once

// Day-scale slot loop over geometry, physics, weather and scheduling, plus
// the two-station overhead-orbit relay study.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qsched/environment.hpp"
#include "qsched/scheduler.hpp"

namespace qsched {

// New York, Chicago, Los Angeles, London, Madrid, Sao Paulo.
std::vector<GroundStation> default_stations();

struct ScenarioConfig {
  ConstellationConfig constellation;
  std::vector<GroundStation> stations = default_stations();
  std::vector<PairSpec> pairs;  // empty: every station pair with pair_cap
  int transmitter_cap = 10;
  int reflector_cap = 10;
  int pair_cap = 10;
  double slot_duration_s = 10.0;
  int horizon = 8640;
  int month = 9;
  Policy policy = Policy::kPrimaryRatesum;
  LinkParams link;
  std::string weather_path;  // empty: synthetic weather from weather_seed
  std::uint64_t weather_seed = 7;
  int threads = 0;  // 0: hardware concurrency

  bool operator==(const ScenarioConfig&) const = default;
};

// Throws ConfigError naming the offending field.
void validate(const ScenarioConfig& config);

NetworkSpec make_network(const ScenarioConfig& config);
EnvironmentTable load_environment(const ScenarioConfig& config);

struct SlotMetrics {
  int t = 0;
  double aggregate_edr = 0.0;
  std::vector<double> per_pair_edr;
  int connectivity = 0;
  int handovers_since_prev = 0;
};

struct RunReport {
  Policy policy = Policy::kPrimaryRatesum;
  double slot_duration_s = 0.0;
  std::vector<std::string> pair_ids;
  std::vector<SlotMetrics> series;
  std::vector<double> per_pair_daily;  // ebits over the horizon
  int served_pair_count = 0;
  int total_handovers = 0;
  int gap_limited_slots = 0;
};

// Pairs with at least one satellite able to serve them directly.
int connectivity(const SlotInstance& instance);

// For every pair served in both slots, satellites (or source/relay
// combinations) serving it in `prev` but not in `next`.
int count_handovers(const Allocation& prev, const Allocation& next);

// Builds and solves one slot.
struct SlotOutcome {
  SlotInstance instance;
  Allocation allocation;
};
SlotOutcome run_slot(const ScenarioConfig& config, const NetworkSpec& network,
                     const EnvironmentTable& weather, int t, const SolverOptions& options = {});

// Slots are evaluated in parallel chunks; handovers are folded in slot
// order. Errors are rethrown as SlotError for the earliest failing slot.
RunReport run(const ScenarioConfig& config, const EnvironmentTable& weather,
              const SolverOptions& options = {});
RunReport run(const ScenarioConfig& config);

void write_metrics_csv(const RunReport& report, std::ostream& out);
void write_per_pair_csv(const RunReport& report, std::ostream& out);
std::string report_to_json(const RunReport& report);

struct CaseStudyParams {
  double altitude_m = 1000e3;
  double min_elevation_deg = 20.0;
  double zenith_transmissivity = 0.8;
  double mirror_efficiency = 0.95;
  double fidelity_threshold = 0.85;
  OpticsParams optics;
  SourceParams source;
  double earth_radius_m = 6371e3;
  double gravitational_parameter = 3.986004418e14;
  double atmosphere_height_m = kDefaultAtmosphereHeight;
  double isl_clearance_m = kDefaultIslClearance;
  int phase_samples = 721;
  double time_step_s = 1.0;
};

struct CaseStudyPoint {
  double baseline_m = 0.0;
  double primary_edr = 0.0;     // ebits per pass
  double reflection_edr = 0.0;  // ebits per pass, best phase offset
  double ratio = 0.0;           // reflection / primary; 1 when both are 0
  double best_phase_rad = 0.0;
};

// Two stations `baseline_m` apart under a shared orbit, clear sky, no
// background light. The primary figure integrates one satellite over its
// pass. The relay figure adds a mirror satellite on the same orbit at a
// swept phase offset and, at each step, uses the best of the direct link
// and the two relayed configurations.
CaseStudyPoint case_study(double baseline_m, const CaseStudyParams& params = {});
std::vector<CaseStudyPoint> case_study_sweep(const std::vector<double>& baselines_m,
                                             const CaseStudyParams& params = {}, int threads = 0);

void write_case_study_csv(const std::vector<CaseStudyPoint>& points, std::ostream& out);

}  // namespace qsched
