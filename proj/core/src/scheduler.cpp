#include "qsched/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "qsched/error.hpp"

namespace qsched {

std::vector<PairSpec> all_station_pairs(const std::vector<GroundStation>& stations, int pair_cap) {
  std::vector<PairSpec> pairs;
  for (std::size_t a = 0; a < stations.size(); ++a) {
    for (std::size_t b = a + 1; b < stations.size(); ++b) {
      pairs.push_back({stations[a].id + "|" + stations[b].id, stations[a].id, stations[b].id,
                       pair_cap});
    }
  }
  return pairs;
}

namespace {

constexpr std::pair<Policy, const char*> kPolicyNames[] = {
    {Policy::kPrimaryRatesum, "primary_ratesum"},
    {Policy::kPrimaryRatefair, "primary_ratefair"},
    {Policy::kReflectionRatesum, "reflection_ratesum"},
    {Policy::kReflectionRatefair, "reflection_ratefair"},
    {Policy::kStsr, "stsr"},
    {Policy::kStmr, "stmr"},
};

}  // namespace

const char* to_string(Policy policy) {
  for (const auto& [p, name] : kPolicyNames) {
    if (p == policy) return name;
  }
  return "unknown";
}

Policy parse_policy(std::string_view name) {
  for (const auto& [p, n] : kPolicyNames) {
    if (name == n) return p;
  }
  throw ConfigError("scheduler", "unknown policy '" + std::string(name) + "'");
}

bool uses_reflection(Policy policy) {
  return policy == Policy::kReflectionRatesum || policy == Policy::kReflectionRatefair;
}

namespace {

bool entry_less(int s1, int r1, int p1, int s2, int r2, int p2) {
  return std::tie(s1, r1, p1) < std::tie(s2, r2, p2);
}

}  // namespace

double SlotInstance::nu_at(int source, int relay, int pair) const {
  auto it = std::lower_bound(nu.begin(), nu.end(), std::tie(source, relay, pair),
                             [](const ReflectionEntry& e, const auto& key) {
                               return entry_less(e.source, e.relay, e.pair, std::get<0>(key),
                                                 std::get<1>(key), std::get<2>(key));
                             });
  if (it != nu.end() && it->source == source && it->relay == relay && it->pair == pair) {
    return it->rate;
  }
  return 0.0;
}

int Allocation::y_at(int source, int relay, int pair) const {
  for (const auto& c : y) {
    if (c.source == source && c.relay == relay && c.pair == pair) return c.count;
  }
  return 0;
}

void validate(const SlotInstance& in) {
  const std::size_t n = in.satellite_count();
  const std::size_t g = in.station_count();
  const std::size_t m = in.pair_count();
  auto fail = [](const std::string& what) { throw StructuralError("scheduler", what); };
  if (in.omega.rows() != n || in.omega.cols() != m) fail("omega shape does not match ids");
  if (in.fidelity.rows() != in.omega.rows() || in.fidelity.cols() != in.omega.cols()) {
    fail("fidelity shape does not match omega");
  }
  if (in.pair_stations.size() != m) fail("pair_stations size does not match pair ids");
  if (in.sat_caps.size() != n) fail("sat_caps size does not match satellites");
  if (in.gs_caps.size() != g) fail("gs_caps size does not match stations");
  if (in.pair_caps.size() != m) fail("pair_caps size does not match pairs");
  if (in.reflector_caps.size() != n) fail("reflector_caps size does not match satellites");
  for (double w : in.omega.values()) {
    if (!(w >= 0.0) || !std::isfinite(w)) fail("omega entries must be finite and nonnegative");
  }
  for (std::size_t j = 0; j < m; ++j) {
    const auto [a, b] = in.pair_stations[j];
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= g || static_cast<std::size_t>(b) >= g) {
      fail("pair " + in.pair_ids[j] + " references an unknown station");
    }
    if (a == b) fail("pair " + in.pair_ids[j] + " uses the same station twice");
  }
  auto nonneg = [&](const std::vector<int>& caps, const char* name) {
    for (int c : caps) {
      if (c < 0) fail(std::string(name) + " must be nonnegative");
    }
  };
  nonneg(in.sat_caps, "sat_caps");
  nonneg(in.gs_caps, "gs_caps");
  nonneg(in.pair_caps, "pair_caps");
  nonneg(in.reflector_caps, "reflector_caps");
  for (std::size_t j = 0; j < m; ++j) {
    for (int s : in.pair_stations[j]) {
      if (in.gs_caps[s] < in.pair_caps[j]) {
        throw ConfigError("scheduler", "station " + in.station_ids[s] + " receiver cap " +
                                           std::to_string(in.gs_caps[s]) + " is below cap " +
                                           std::to_string(in.pair_caps[j]) + " of pair " +
                                           in.pair_ids[j]);
      }
    }
  }
  for (std::size_t e = 0; e < in.nu.size(); ++e) {
    const auto& r = in.nu[e];
    if (!in.reflection_mode) fail("relay entries present in a primary-mode instance");
    if (r.source < 0 || r.relay < 0 || r.pair < 0 || static_cast<std::size_t>(r.source) >= n ||
        static_cast<std::size_t>(r.relay) >= n || static_cast<std::size_t>(r.pair) >= m) {
      fail("relay entry index out of range");
    }
    if (r.source == r.relay) fail("relay entry with source == relay");
    if (!(r.rate > 0.0) || !std::isfinite(r.rate)) fail("relay rates must be finite and positive");
    if (e > 0) {
      const auto& p = in.nu[e - 1];
      if (!entry_less(p.source, p.relay, p.pair, r.source, r.relay, r.pair)) {
        fail("relay entries must be strictly sorted by (source, relay, pair)");
      }
    }
  }
}

SlotInstance make_instance(const Grid<double>& omega,
                           const std::vector<std::array<int, 2>>& pair_stations,
                           std::vector<int> sat_caps, std::vector<int> gs_caps,
                           std::vector<int> pair_caps, std::vector<int> reflector_caps) {
  SlotInstance in;
  for (std::size_t i = 0; i < omega.rows(); ++i) in.satellite_ids.push_back("S" + std::to_string(i));
  for (std::size_t g = 0; g < gs_caps.size(); ++g) in.station_ids.push_back("G" + std::to_string(g));
  for (std::size_t j = 0; j < omega.cols(); ++j) in.pair_ids.push_back("P" + std::to_string(j));
  in.pair_stations = pair_stations;
  in.omega = omega;
  in.fidelity = Grid<double>(omega.rows(), omega.cols(), 0.0);
  in.sat_caps = std::move(sat_caps);
  in.gs_caps = std::move(gs_caps);
  in.pair_caps = std::move(pair_caps);
  in.reflector_caps =
      reflector_caps.empty() ? std::vector<int>(omega.rows(), 0) : std::move(reflector_caps);
  validate(in);
  return in;
}

void validate(const NetworkSpec& network) {
  std::unordered_map<std::string, int> caps;
  for (const auto& s : network.stations) {
    validate(s);
    if (!caps.emplace(s.id, s.receiver_cap).second) {
      throw ConfigError("scheduler", "duplicate station id " + s.id);
    }
  }
  std::unordered_set<std::string> ids;
  for (const auto& sat : network.satellites) {
    if (!ids.insert(sat.id).second) throw ConfigError("scheduler", "duplicate satellite id " + sat.id);
    if (sat.transmitter_cap < 0 || sat.reflector_cap < 0) {
      throw ConfigError("scheduler", "satellite " + sat.id + " caps must be nonnegative");
    }
  }
  ids.clear();
  for (const auto& p : network.pairs) {
    if (!ids.insert(p.id).second) throw ConfigError("scheduler", "duplicate pair id " + p.id);
    if (p.station_a == p.station_b) {
      throw ConfigError("scheduler", "pair " + p.id + " uses station " + p.station_a + " twice");
    }
    if (p.pair_cap < 0) throw ConfigError("scheduler", "pair " + p.id + " cap must be nonnegative");
    for (const auto& s : {p.station_a, p.station_b}) {
      auto it = caps.find(s);
      if (it == caps.end()) {
        throw ConfigError("scheduler", "pair " + p.id + " references unknown station " + s);
      }
      if (it->second < p.pair_cap) {
        throw ConfigError("scheduler", "station " + s + " receiver cap " +
                                           std::to_string(it->second) + " is below cap " +
                                           std::to_string(p.pair_cap) + " of pair " + p.id);
      }
    }
  }
}

DownlinkBudget downlink_budget(const Vec3& satellite, const Vec3& station,
                               const WeatherRecord& weather, const LinkParams& params) {
  const auto geo = link_geometry(satellite, station, params.atmosphere_height_m);
  DownlinkBudget b;
  b.elevation_deg = geo.elevation_deg;
  b.slant_range_m = geo.slant_range_m;
  const double fs = free_space_transmissivity(params.optics, geo.slant_range_m);
  const double atm = effective_transmissivity(weather, geo.elevation_deg);
  b.arm.transmissivity =
      arm_transmissivity(fs, atm, params.optics.tx_efficiency, params.optics.rx_efficiency);
  b.arm.dark_click_prob = dark_click_prob(weather.solar_irradiance, params.detector, params.optics);
  return b;
}

double gated_rate(const PairOutcome& outcome, double elevation_a, double elevation_b,
                  const LinkParams& params) {
  if (elevation_a < params.min_elevation_deg || elevation_b < params.min_elevation_deg) return 0.0;
  if (!(outcome.fidelity >= params.fidelity_threshold)) return 0.0;
  return outcome.edr;
}

namespace {

struct Built {
  SlotInstance instance;
  // budgets[i * stations + g]
  std::vector<DownlinkBudget> budgets;
  std::vector<std::size_t> sat_rows;  // snapshot index of each satellite
};

Built build_primary(const ConstellationSnapshot& snapshot, const NetworkSpec& network,
                    const LinkParams& params, const EnvironmentTable& weather, int month) {
  validate(network);
  Built out;
  SlotInstance& in = out.instance;
  in.time = snapshot.time();
  const std::size_t n = network.satellites.size();
  const std::size_t ng = network.stations.size();
  const std::size_t m = network.pairs.size();

  std::unordered_map<std::string, int> station_of;
  std::vector<std::size_t> gs_rows;
  for (std::size_t g = 0; g < ng; ++g) {
    const auto& s = network.stations[g];
    station_of[s.id] = static_cast<int>(g);
    in.station_ids.push_back(s.id);
    in.gs_caps.push_back(s.receiver_cap);
    gs_rows.push_back(snapshot.station_index(s.id));
  }
  for (const auto& sat : network.satellites) {
    in.satellite_ids.push_back(sat.id);
    in.sat_caps.push_back(sat.transmitter_cap);
    in.reflector_caps.push_back(sat.reflector_cap);
    out.sat_rows.push_back(snapshot.satellite_index(sat.id));
  }
  for (const auto& p : network.pairs) {
    in.pair_ids.push_back(p.id);
    in.pair_caps.push_back(p.pair_cap);
    in.pair_stations.push_back({station_of.at(p.station_a), station_of.at(p.station_b)});
  }

  const double hour = std::fmod(snapshot.elapsed_s() / 3600.0, 24.0);
  std::vector<const WeatherRecord*> records;
  for (const auto& s : network.stations) {
    if (!weather.covers(s.id, month)) {
      throw IngestionError("environment", "no weather record for station " + s.id + " month " +
                                              std::to_string(month));
    }
    records.push_back(&weather.lookup(s.id, month, hour < 0 ? hour + 24.0 : hour));
  }

  out.budgets.resize(n * ng);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& sp = snapshot.satellite_position(out.sat_rows[i]);
    for (std::size_t g = 0; g < ng; ++g) {
      out.budgets[i * ng + g] =
          downlink_budget(sp, snapshot.station_position(gs_rows[g]), *records[g], params);
    }
  }

  in.omega = Grid<double>(n, m, 0.0);
  in.fidelity = Grid<double>(n, m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const auto& ba = out.budgets[i * ng + in.pair_stations[j][0]];
      const auto& bb = out.budgets[i * ng + in.pair_stations[j][1]];
      if (ba.elevation_deg < params.min_elevation_deg ||
          bb.elevation_deg < params.min_elevation_deg) {
        continue;
      }
      const auto outcome = end_to_end_outcome(params.source, ba.arm, bb.arm);
      in.fidelity(i, j) = outcome.fidelity;
      in.omega(i, j) = gated_rate(outcome, ba.elevation_deg, bb.elevation_deg, params);
    }
  }
  return out;
}

}  // namespace

SlotInstance build_weights(const ConstellationSnapshot& snapshot, const NetworkSpec& network,
                           const LinkParams& params, const EnvironmentTable& weather, int month) {
  auto built = build_primary(snapshot, network, params, weather, month);
  validate(built.instance);
  return std::move(built.instance);
}

SlotInstance build_reflection_weights(const ConstellationSnapshot& snapshot,
                                      const NetworkSpec& network, const LinkParams& params,
                                      const EnvironmentTable& weather, int month) {
  if (!(params.mirror_efficiency >= 0.0 && params.mirror_efficiency <= 1.0)) {
    throw ParameterError("scheduler", "mirror efficiency must lie in [0, 1]");
  }
  auto built = build_primary(snapshot, network, params, weather, month);
  SlotInstance& in = built.instance;
  in.reflection_mode = true;
  const std::size_t n = in.satellite_count();
  const std::size_t ng = in.station_count();
  const std::size_t m = in.pair_count();
  const double min_radius = snapshot.earth_radius_m() + params.isl_clearance_m;
  auto sees = [&](std::size_t i, int g) {
    return built.budgets[i * ng + g].elevation_deg >= params.min_elevation_deg;
  };
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& pi = snapshot.satellite_position(built.sat_rows[i]);
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      bool checked = false;
      bool visible = false;
      double isl = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const auto [a, b] = in.pair_stations[j];
        if (!sees(i, a) || !sees(k, b)) continue;
        if (!checked) {
          const Vec3& pk = snapshot.satellite_position(built.sat_rows[k]);
          visible = segment_clears_earth(pi, pk, min_radius);
          isl = inter_satellite_transmissivity(params.optics, (pi - pk).norm());
          checked = true;
        }
        if (!visible) break;
        const auto& ba = built.budgets[i * ng + a];
        const auto& bb = built.budgets[k * ng + b];
        const auto arms = reflection_arms(ba.arm, isl, params.mirror_efficiency, bb.arm);
        const auto outcome = end_to_end_outcome(params.source, arms.first, arms.second);
        const double rate = gated_rate(outcome, ba.elevation_deg, bb.elevation_deg, params);
        if (rate > 0.0) {
          in.nu.push_back({static_cast<int>(i), static_cast<int>(k), static_cast<int>(j), rate,
                           outcome.fidelity});
        }
      }
    }
  }
  validate(in);
  return std::move(in);
}

std::vector<double> per_pair_edr(const SlotInstance& in, const Allocation& alloc) {
  std::vector<double> edr(in.pair_count(), 0.0);
  for (std::size_t i = 0; i < alloc.x.rows(); ++i) {
    for (std::size_t j = 0; j < alloc.x.cols(); ++j) {
      if (alloc.x(i, j) != 0) edr[j] += in.omega(i, j) * alloc.x(i, j);
    }
  }
  for (const auto& c : alloc.y) edr[c.pair] += in.nu_at(c.source, c.relay, c.pair) * c.count;
  return edr;
}

double min_fractional_edr(const SlotInstance& in, const Allocation& alloc,
                          const std::vector<double>& best_rates) {
  const auto edr = per_pair_edr(in, alloc);
  double lo = 0.0;
  bool any = false;
  for (std::size_t j = 0; j < edr.size(); ++j) {
    if (!(best_rates.at(j) > 0.0)) continue;
    const double f = edr[j] / best_rates[j];
    lo = any ? std::min(lo, f) : f;
    any = true;
  }
  return lo;
}

std::vector<std::string> allocation_violations(const SlotInstance& in, const Allocation& alloc) {
  std::vector<std::string> out;
  const std::size_t n = in.satellite_count();
  const std::size_t m = in.pair_count();
  if (alloc.x.rows() != n || alloc.x.cols() != m) {
    out.push_back("x shape does not match the instance");
    return out;
  }
  std::vector<long long> sat(n, 0), gs(in.station_count(), 0), pair(m, 0), refl(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const long long v = alloc.x(i, j);
      if (v < 0) out.push_back("x[" + std::to_string(i) + "][" + std::to_string(j) + "] < 0");
      sat[i] += v;
      pair[j] += v;
      gs[in.pair_stations[j][0]] += v;
      gs[in.pair_stations[j][1]] += v;
    }
  }
  for (const auto& c : alloc.y) {
    if (c.source < 0 || c.relay < 0 || c.pair < 0 || static_cast<std::size_t>(c.source) >= n ||
        static_cast<std::size_t>(c.relay) >= n || static_cast<std::size_t>(c.pair) >= m) {
      out.push_back("y index out of range");
      continue;
    }
    if (c.count < 0) out.push_back("y count < 0");
    if (c.source == c.relay) out.push_back("y uses a satellite as its own relay");
    if (!in.reflection_mode && c.count != 0) out.push_back("y nonzero in primary mode");
    sat[c.source] += c.count;
    refl[c.relay] += c.count;
    pair[c.pair] += c.count;
    gs[in.pair_stations[c.pair][0]] += c.count;
    gs[in.pair_stations[c.pair][1]] += c.count;
  }
  auto check = [&](const std::vector<long long>& used, const std::vector<int>& caps,
                   const std::vector<std::string>& ids, const char* what) {
    for (std::size_t r = 0; r < used.size(); ++r) {
      if (used[r] > caps[r]) {
        out.push_back(std::string(what) + " " + ids[r] + " uses " + std::to_string(used[r]) +
                      " > cap " + std::to_string(caps[r]));
      }
    }
  };
  check(sat, in.sat_caps, in.satellite_ids, "transmitter");
  check(gs, in.gs_caps, in.station_ids, "receiver");
  check(pair, in.pair_caps, in.pair_ids, "pair");
  check(refl, in.reflector_caps, in.satellite_ids, "reflector");
  return out;
}

}  // namespace qsched
