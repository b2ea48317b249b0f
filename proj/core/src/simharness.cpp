#include "qsched/simharness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "json.hpp"
#include "qsched/error.hpp"

namespace qsched {

namespace {

constexpr const char* kComponent = "simharness";

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(kComponent, field + " " + what);
}

}  // namespace

std::vector<GroundStation> default_stations() {
  return {
      {"NYC", 40.71, -74.01, 10}, {"CHI", 41.88, -87.63, 10}, {"LAX", 34.05, -118.24, 10},
      {"LON", 51.51, -0.13, 10},  {"MAD", 40.42, -3.70, 10},  {"SAO", -23.55, -46.63, 10},
  };
}

void validate(const ScenarioConfig& c) {
  validate(c.constellation);
  require(!c.stations.empty(), "stations", "must not be empty");
  require(c.transmitter_cap >= 0, "T", "must be nonnegative");
  require(c.reflector_cap >= 0, "U", "must be nonnegative");
  require(c.pair_cap >= 0, "L", "must be nonnegative");
  require(c.slot_duration_s > 0.0 && std::isfinite(c.slot_duration_s), "slot_duration_s",
          "must be positive");
  require(c.horizon > 0, "horizon_slots", "must be positive");
  require(c.month >= 1 && c.month <= 12, "month", "must lie in 1..12");
  require(c.policy == Policy::kPrimaryRatesum || c.policy == Policy::kPrimaryRatefair ||
              c.policy == Policy::kReflectionRatesum || c.policy == Policy::kReflectionRatefair,
          "policy", "must be one of the four scheduling policies");
  const auto& l = c.link;
  require(l.min_elevation_deg >= 0.0 && l.min_elevation_deg < 90.0, "theta_e_deg",
          "must lie in [0, 90)");
  require(l.fidelity_threshold >= 0.0 && l.fidelity_threshold <= 1.0, "F_th",
          "must lie in [0, 1]");
  require(l.mirror_efficiency >= 0.0 && l.mirror_efficiency <= 1.0, "mirror_efficiency",
          "must lie in [0, 1]");
  require(l.optics.tx_radius > 0.0, "tx_radius_m", "must be positive");
  require(l.optics.rx_radius > 0.0, "rx_radius_m", "must be positive");
  require(l.optics.relay_radius > 0.0, "relay_radius_m", "must be positive");
  require(l.optics.wavelength > 0.0, "wavelength_nm", "must be positive");
  require(l.optics.tx_efficiency >= 0.0 && l.optics.tx_efficiency <= 1.0, "eta_T",
          "must lie in [0, 1]");
  require(l.optics.rx_efficiency >= 0.0 && l.optics.rx_efficiency <= 1.0, "eta_R",
          "must lie in [0, 1]");
  require(l.source.mean_photon_number > 0.0, "N_s", "must be positive");
  require(l.source.repetition_rate > 0.0, "rep_rate", "must be positive");
  require(l.source.sign == 1 || l.source.sign == -1, "bell_sign", "must be +1 or -1");
  require(l.detector.gate_s > 0.0, "gate_s", "must be positive");
  require(l.detector.bandwidth_nm > 0.0, "bandwidth_nm", "must be positive");
  require(l.detector.fov_sr > 0.0, "fov_sr", "must be positive");
  require(l.atmosphere_height_m > 0.0, "atmosphere_height_m", "must be positive");
  require(l.isl_clearance_m >= 0.0, "isl_clearance_m", "must be nonnegative");
  require(c.threads >= 0, "threads", "must be nonnegative");
  validate(make_network(c));
}

NetworkSpec make_network(const ScenarioConfig& c) {
  NetworkSpec net;
  net.satellites = make_satellites(c.constellation, c.transmitter_cap, c.reflector_cap);
  net.stations = c.stations;
  net.pairs = c.pairs.empty() ? all_station_pairs(c.stations, c.pair_cap) : c.pairs;
  return net;
}

EnvironmentTable load_environment(const ScenarioConfig& c) {
  if (!c.weather_path.empty()) return load_weather(c.weather_path);
  return synth_weather(c.weather_seed, c.stations, {c.month});
}

int connectivity(const SlotInstance& in) {
  int count = 0;
  for (std::size_t j = 0; j < in.pair_count(); ++j) {
    for (std::size_t i = 0; i < in.satellite_count(); ++i) {
      if (in.omega(i, j) > 0.0) {
        ++count;
        break;
      }
    }
  }
  return count;
}

int count_handovers(const Allocation& prev, const Allocation& next) {
  if (prev.x.rows() != next.x.rows() || prev.x.cols() != next.x.cols()) {
    throw StructuralError(kComponent, "handover count between allocations of different shape");
  }
  const std::size_t m = prev.x.cols();
  auto servers = [m](const Allocation& a) {
    std::vector<std::set<std::pair<int, int>>> s(m);
    for (std::size_t i = 0; i < a.x.rows(); ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (a.x(i, j) > 0) s[j].emplace(static_cast<int>(i), -1);
      }
    }
    for (const auto& c : a.y) {
      if (c.count > 0) s[c.pair].emplace(c.source, c.relay);
    }
    return s;
  };
  const auto before = servers(prev);
  const auto after = servers(next);
  int handovers = 0;
  for (std::size_t j = 0; j < m; ++j) {
    if (before[j].empty() || after[j].empty()) continue;
    for (const auto& s : before[j]) handovers += after[j].count(s) == 0 ? 1 : 0;
  }
  return handovers;
}

SlotOutcome run_slot(const ScenarioConfig& config, const NetworkSpec& network,
                     const EnvironmentTable& weather, int t, const SolverOptions& options) {
  const auto snapshot =
      propagate(config.constellation, config.stations, t, config.slot_duration_s);
  SlotOutcome out;
  out.instance = uses_reflection(config.policy)
                     ? build_reflection_weights(snapshot, network, config.link, weather, config.month)
                     : build_weights(snapshot, network, config.link, weather, config.month);
  out.allocation = solve(out.instance, config.policy, options);
  const auto bad = allocation_violations(out.instance, out.allocation);
  if (!bad.empty()) throw StructuralError("scheduler", "infeasible allocation: " + bad.front());
  return out;
}

RunReport run(const ScenarioConfig& config, const EnvironmentTable& weather,
              const SolverOptions& options) {
  validate(config);
  const NetworkSpec network = make_network(config);
  const int horizon = config.horizon;
  const int chunks = std::min(resolve_threads(config.threads), horizon);

  RunReport report;
  report.policy = config.policy;
  report.slot_duration_s = config.slot_duration_s;
  for (const auto& p : network.pairs) report.pair_ids.push_back(p.id);
  report.series.resize(horizon);

  struct Chunk {
    int begin = 0;
    int end = 0;
    Allocation first;
    Allocation last;
    int gap_limited = 0;
    int failed_slot = -1;
    std::exception_ptr error;
  };
  std::vector<Chunk> parts(chunks);
  for (int c = 0; c < chunks; ++c) {
    parts[c].begin = static_cast<int>(static_cast<long long>(horizon) * c / chunks);
    parts[c].end = static_cast<int>(static_cast<long long>(horizon) * (c + 1) / chunks);
  }

  auto work = [&](Chunk& part) {
    int t = part.begin;
    try {
      Allocation prev;
      for (; t < part.end; ++t) {
        auto slot = run_slot(config, network, weather, t, options);
        SlotMetrics& m = report.series[t];
        m.t = t;
        m.per_pair_edr = per_pair_edr(slot.instance, slot.allocation);
        m.aggregate_edr = 0.0;
        for (double e : m.per_pair_edr) m.aggregate_edr += e;
        m.connectivity = connectivity(slot.instance);
        m.handovers_since_prev = t == part.begin ? 0 : count_handovers(prev, slot.allocation);
        if (slot.allocation.status == ilp::SolveStatus::kGapLimit) ++part.gap_limited;
        if (t == part.begin) part.first = slot.allocation;
        prev = std::move(slot.allocation);
      }
      part.last = std::move(prev);
    } catch (...) {
      part.failed_slot = t;
      part.error = std::current_exception();
    }
  };

  std::vector<std::thread> pool;
  for (int c = 1; c < chunks; ++c) pool.emplace_back(work, std::ref(parts[c]));
  work(parts[0]);
  for (auto& th : pool) th.join();

  for (const auto& part : parts) {
    if (!part.error) continue;
    try {
      std::rethrow_exception(part.error);
    } catch (const SlotError&) {
      throw;
    } catch (const Error& e) {
      throw SlotError(part.failed_slot, e);
    } catch (const std::exception& e) {
      throw SlotError(part.failed_slot, Error(kComponent, e.what()));
    }
  }

  for (int c = 1; c < chunks; ++c) {
    report.series[parts[c].begin].handovers_since_prev =
        count_handovers(parts[c - 1].last, parts[c].first);
  }

  report.per_pair_daily.assign(report.pair_ids.size(), 0.0);
  for (const auto& m : report.series) {
    for (std::size_t j = 0; j < m.per_pair_edr.size(); ++j) {
      report.per_pair_daily[j] += m.per_pair_edr[j] * config.slot_duration_s;
    }
    report.total_handovers += m.handovers_since_prev;
  }
  for (const auto& part : parts) report.gap_limited_slots += part.gap_limited;
  report.served_pair_count = static_cast<int>(
      std::count_if(report.per_pair_daily.begin(), report.per_pair_daily.end(),
                    [](double v) { return v > 0.0; }));
  return report;
}

RunReport run(const ScenarioConfig& config) {
  validate(config);
  return run(config, load_environment(config));
}

void write_metrics_csv(const RunReport& report, std::ostream& out) {
  out << "t,aggregate_edr,connectivity,handovers\n";
  for (const auto& m : report.series) {
    out << m.t << ',' << fmt(m.aggregate_edr) << ',' << m.connectivity << ','
        << m.handovers_since_prev << '\n';
  }
}

void write_per_pair_csv(const RunReport& report, std::ostream& out) {
  out << "pair_id,daily_ebits\n";
  for (std::size_t j = 0; j < report.pair_ids.size(); ++j) {
    out << report.pair_ids[j] << ',' << fmt(report.per_pair_daily[j]) << '\n';
  }
}

std::string report_to_json(const RunReport& report) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["policy"] = to_string(report.policy);
  doc["slot_duration_s"] = report.slot_duration_s;
  doc["served_pair_count"] = report.served_pair_count;
  doc["total_handovers"] = report.total_handovers;
  doc["gap_limited_slots"] = report.gap_limited_slots;
  ordered_json daily = ordered_json::object();
  for (std::size_t j = 0; j < report.pair_ids.size(); ++j) {
    daily[report.pair_ids[j]] = report.per_pair_daily[j];
  }
  doc["per_pair_daily"] = std::move(daily);
  ordered_json series = ordered_json::array();
  for (const auto& m : report.series) {
    ordered_json s;
    s["t"] = m.t;
    s["aggregate_edr"] = m.aggregate_edr;
    s["connectivity"] = m.connectivity;
    s["handovers_since_prev"] = m.handovers_since_prev;
    ordered_json per = ordered_json::object();
    for (std::size_t j = 0; j < report.pair_ids.size(); ++j) {
      per[report.pair_ids[j]] = m.per_pair_edr[j];
    }
    s["per_pair_edr"] = std::move(per);
    series.push_back(std::move(s));
  }
  doc["series"] = std::move(series);
  return doc.dump(2);
}

}  // namespace qsched
