#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qsched/error.hpp"

namespace qsched::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr const char* kComponent = "cli";

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw ConfigError(kComponent, field + ": " + what);
}

double get_number(const json& v, const std::string& field) {
  if (!v.is_number()) bad(field, "expected a number");
  return v.get<double>();
}

long long get_integer(const json& v, const std::string& field) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<long long>(d);
  }
  bad(field, "expected an integer");
}

int get_int(const json& v, const std::string& field) {
  const long long x = get_integer(v, field);
  if (x < INT32_MIN || x > INT32_MAX) bad(field, "out of range");
  return static_cast<int>(x);
}

std::string get_string(const json& v, const std::string& field) {
  if (!v.is_string()) bad(field, "expected a string");
  return v.get<std::string>();
}

void range(bool ok, const std::string& field, const std::string& what) {
  if (!ok) bad(field, what);
}

// Top-level scalar fields.
struct Field {
  const char* key;
  std::function<void(ScenarioConfig&, const json&)> read;
  std::function<json(const ScenarioConfig&)> write;
};

template <typename Get>
Field number(const char* key, Get get) {
  return {key,
          [key, get](ScenarioConfig& c, const json& v) { get(c) = get_number(v, key); },
          [get](const ScenarioConfig& c) { return json(get(const_cast<ScenarioConfig&>(c))); }};
}

template <typename Get>
Field integer(const char* key, Get get) {
  return {key,
          [key, get](ScenarioConfig& c, const json& v) { get(c) = get_int(v, key); },
          [get](const ScenarioConfig& c) { return json(get(const_cast<ScenarioConfig&>(c))); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      integer("T", [](ScenarioConfig& c) -> int& { return c.transmitter_cap; }),
      integer("U", [](ScenarioConfig& c) -> int& { return c.reflector_cap; }),
      integer("L", [](ScenarioConfig& c) -> int& { return c.pair_cap; }),
      number("slot_duration_s", [](ScenarioConfig& c) -> double& { return c.slot_duration_s; }),
      integer("horizon_slots", [](ScenarioConfig& c) -> int& { return c.horizon; }),
      integer("month", [](ScenarioConfig& c) -> int& { return c.month; }),
      number("theta_e_deg", [](ScenarioConfig& c) -> double& { return c.link.min_elevation_deg; }),
      number("F_th", [](ScenarioConfig& c) -> double& { return c.link.fidelity_threshold; }),
      number("tx_radius_m", [](ScenarioConfig& c) -> double& { return c.link.optics.tx_radius; }),
      number("rx_radius_m", [](ScenarioConfig& c) -> double& { return c.link.optics.rx_radius; }),
      number("relay_radius_m",
             [](ScenarioConfig& c) -> double& { return c.link.optics.relay_radius; }),
      number("wavelength_m", [](ScenarioConfig& c) -> double& { return c.link.optics.wavelength; }),
      number("eta_T", [](ScenarioConfig& c) -> double& { return c.link.optics.tx_efficiency; }),
      number("eta_R", [](ScenarioConfig& c) -> double& { return c.link.optics.rx_efficiency; }),
      number("N_s", [](ScenarioConfig& c) -> double& { return c.link.source.mean_photon_number; }),
      number("rep_rate", [](ScenarioConfig& c) -> double& { return c.link.source.repetition_rate; }),
      integer("bell_sign", [](ScenarioConfig& c) -> int& { return c.link.source.sign; }),
      number("gate_s", [](ScenarioConfig& c) -> double& { return c.link.detector.gate_s; }),
      number("bandwidth_nm", [](ScenarioConfig& c) -> double& { return c.link.detector.bandwidth_nm; }),
      number("fov_sr", [](ScenarioConfig& c) -> double& { return c.link.detector.fov_sr; }),
      number("atmosphere_height_m",
             [](ScenarioConfig& c) -> double& { return c.link.atmosphere_height_m; }),
      number("isl_clearance_m", [](ScenarioConfig& c) -> double& { return c.link.isl_clearance_m; }),
      number("mirror_efficiency",
             [](ScenarioConfig& c) -> double& { return c.link.mirror_efficiency; }),
      integer("threads", [](ScenarioConfig& c) -> int& { return c.threads; }),
  };
  return table;
}

void read_constellation(ConstellationConfig& k, const json& v) {
  if (!v.is_object()) bad("constellation", "expected an object");
  for (const auto& [key, val] : v.items()) {
    const std::string field = "constellation." + key;
    if (key == "rings") k.rings = get_int(val, field);
    else if (key == "sats_per_ring") k.sats_per_ring = get_int(val, field);
    else if (key == "altitude_m") k.altitude_m = get_number(val, field);
    else if (key == "epoch_s") k.epoch_s = get_number(val, field);
    else if (key == "earth_radius_m") k.earth_radius_m = get_number(val, field);
    else if (key == "earth_rotation_period_s") k.earth_rotation_period_s = get_number(val, field);
    else if (key == "gravitational_parameter") k.gravitational_parameter = get_number(val, field);
    else bad(field, "unknown key");
  }
  range(k.rings > 0, "constellation.rings", "must be positive");
  range(k.sats_per_ring > 0, "constellation.sats_per_ring", "must be positive");
  range(k.altitude_m > 0, "constellation.altitude_m", "must be positive");
}

std::vector<GroundStation> read_stations(const json& v, int default_cap) {
  if (!v.is_array()) bad("stations", "expected an array");
  std::vector<GroundStation> out;
  for (std::size_t n = 0; n < v.size(); ++n) {
    const std::string base = "stations[" + std::to_string(n) + "]";
    const auto& s = v[n];
    if (!s.is_object()) bad(base, "expected an object");
    GroundStation g;
    g.receiver_cap = default_cap;
    bool has_id = false;
    for (const auto& [key, val] : s.items()) {
      const std::string field = base + "." + key;
      if (key == "id") {
        g.id = get_string(val, field);
        has_id = true;
      } else if (key == "lat") {
        g.latitude_deg = get_number(val, field);
      } else if (key == "lon") {
        g.longitude_deg = get_number(val, field);
      } else if (key == "receiver_cap") {
        g.receiver_cap = get_int(val, field);
      } else {
        bad(field, "unknown key");
      }
    }
    if (!has_id) bad(base + ".id", "missing");
    range(g.latitude_deg >= -90 && g.latitude_deg <= 90, base + ".lat", "must lie in [-90, 90]");
    range(g.longitude_deg >= -180 && g.longitude_deg <= 180, base + ".lon",
          "must lie in [-180, 180]");
    range(g.receiver_cap >= 0, base + ".receiver_cap", "must be nonnegative");
    out.push_back(g);
  }
  return out;
}

std::vector<PairSpec> read_pairs(const json& v, int default_cap) {
  if (!v.is_array()) bad("pairs", "expected an array");
  std::vector<PairSpec> out;
  for (std::size_t n = 0; n < v.size(); ++n) {
    const std::string base = "pairs[" + std::to_string(n) + "]";
    const auto& s = v[n];
    if (!s.is_object()) bad(base, "expected an object");
    PairSpec p;
    p.pair_cap = default_cap;
    for (const auto& [key, val] : s.items()) {
      const std::string field = base + "." + key;
      if (key == "id") p.id = get_string(val, field);
      else if (key == "a") p.station_a = get_string(val, field);
      else if (key == "b") p.station_b = get_string(val, field);
      else if (key == "cap") p.pair_cap = get_int(val, field);
      else bad(field, "unknown key");
    }
    if (p.station_a.empty()) bad(base + ".a", "missing");
    if (p.station_b.empty()) bad(base + ".b", "missing");
    if (p.id.empty()) p.id = p.station_a + "|" + p.station_b;
    out.push_back(p);
  }
  return out;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError(kComponent, "override '" + assignment + "' is not key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError(kComponent, "override key '" + key + "' is malformed");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      break;
    }
    if (!node->contains(part)) (*node)[part] = json::object();
    node = &(*node)[part];
    if (!node->is_object()) throw ConfigError(kComponent, "override key '" + key + "' is not an object path");
    start = dot + 1;
  }
}

ScenarioConfig from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) bad("<root>", "expected an object");
  ScenarioConfig c;
  int receiver_cap = 10;
  if (doc.contains("R")) receiver_cap = get_int(doc["R"], "R");
  range(receiver_cap >= 0, "R", "must be nonnegative");
  for (auto& s : c.stations) s.receiver_cap = receiver_cap;

  for (const auto& [key, val] : doc.items()) {
    if (key == "R") continue;
    if (key == "constellation") {
      read_constellation(c.constellation, val);
    } else if (key == "stations") {
      c.stations = read_stations(val, receiver_cap);
    } else if (key == "pairs") {
      continue;  // needs L; read below
    } else if (key == "policy") {
      c.policy = parse_policy(get_string(val, "policy"));
    } else if (key == "weather") {
      if (!val.is_object()) bad("weather", "expected an object");
      for (const auto& [wk, wv] : val.items()) {
        if (wk == "path") {
          std::filesystem::path p = get_string(wv, "weather.path");
          if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
          c.weather_path = p.string();
        } else if (wk == "seed") {
          const long long s = get_integer(wv, "weather.seed");
          range(s >= 0, "weather.seed", "must be nonnegative");
          c.weather_seed = static_cast<std::uint64_t>(s);
        } else {
          bad("weather." + wk, "unknown key");
        }
      }
    } else {
      const auto& table = fields();
      auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return key == f.key; });
      if (it == table.end()) bad(key, "unknown key");
      it->read(c, val);
    }
  }
  if (doc.contains("pairs")) c.pairs = read_pairs(doc["pairs"], c.pair_cap);

  try {
    validate(c);
  } catch (const ConfigError& e) {
    throw ConfigError(kComponent, e.what());
  }
  return c;
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view json_text, const std::vector<std::string>& overrides,
                              const std::filesystem::path& base_dir) {
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded()) throw IngestionError(kComponent, "scenario is not valid JSON");
  for (const auto& o : overrides) apply_override(doc, o);
  return from_json(doc, base_dir);
}

ScenarioConfig load_scenario(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw IngestionError(kComponent, "cannot open scenario " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str(), overrides, path.parent_path());
  } catch (const IngestionError& e) {
    throw IngestionError(kComponent, path.string() + ": " + e.what());
  }
}

std::string scenario_to_json(const ScenarioConfig& c) {
  ordered_json doc;
  const auto& k = c.constellation;
  doc["constellation"] = {{"rings", k.rings},
                          {"sats_per_ring", k.sats_per_ring},
                          {"altitude_m", k.altitude_m},
                          {"epoch_s", k.epoch_s},
                          {"earth_radius_m", k.earth_radius_m},
                          {"earth_rotation_period_s", k.earth_rotation_period_s},
                          {"gravitational_parameter", k.gravitational_parameter}};
  ordered_json stations = ordered_json::array();
  for (const auto& s : c.stations) {
    stations.push_back({{"id", s.id},
                        {"lat", s.latitude_deg},
                        {"lon", s.longitude_deg},
                        {"receiver_cap", s.receiver_cap}});
  }
  doc["stations"] = std::move(stations);
  if (!c.pairs.empty()) {
    ordered_json pairs = ordered_json::array();
    for (const auto& p : c.pairs) {
      pairs.push_back({{"id", p.id}, {"a", p.station_a}, {"b", p.station_b}, {"cap", p.pair_cap}});
    }
    doc["pairs"] = std::move(pairs);
  }
  doc["policy"] = to_string(c.policy);
  for (const auto& f : fields()) doc[f.key] = f.write(c);
  ordered_json weather;
  if (!c.weather_path.empty()) weather["path"] = c.weather_path;
  weather["seed"] = c.weather_seed;
  doc["weather"] = std::move(weather);
  return doc.dump(2);
}

void save_scenario(const ScenarioConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IngestionError(kComponent, "cannot write " + path.string());
  out << scenario_to_json(config) << '\n';
}

std::vector<double> parse_range(std::string_view range) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = range.find(':', start);
    const std::string piece(range.substr(start, colon == std::string_view::npos ? range.npos : colon - start));
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(piece, &used));
      if (used != piece.size()) throw std::invalid_argument(piece);
    } catch (const std::exception&) {
      throw ConfigError(kComponent, "range '" + std::string(range) + "' is not start:stop:step");
    }
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
    throw ConfigError(kComponent, "range '" + std::string(range) + "' is not start:stop:step");
  }
  const auto count = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9)) + 1;
  std::vector<double> values;
  for (long n = 0; n < count; ++n) values.push_back(parts[0] + n * parts[2]);
  return values;
}

namespace {

std::vector<GroundStation> load_stations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError(kComponent, "cannot open stations file " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw IngestionError(kComponent, path.string() + " is not valid JSON");
  if (doc.is_array()) return read_stations(doc, 10);
  if (doc.is_object()) {
    if (doc.contains("stations")) return read_stations(doc["stations"], 10);
    return default_stations();
  }
  throw IngestionError(kComponent, path.string() + ": expected a station list or scenario");
}

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestionError(kComponent, "cannot write " + path.string());
  body(out);
  if (!out) throw IngestionError(kComponent, "failed writing " + path.string());
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IngestionError(kComponent, "cannot create " + dir.string() + ": " + ec.message());
}

int simulate(const std::string& config_path, const std::string& out_dir,
             const std::vector<std::string>& overrides, std::ostream& out) {
  const ScenarioConfig config = load_scenario(config_path, overrides);
  const EnvironmentTable weather = load_environment(config);
  const RunReport report = run(config, weather);
  ensure_dir(out_dir);
  const std::filesystem::path dir = out_dir;
  write_file(dir / "metrics.csv", [&](std::ostream& o) { write_metrics_csv(report, o); });
  write_file(dir / "per_pair.csv", [&](std::ostream& o) { write_per_pair_csv(report, o); });
  ordered_json doc;
  doc["scenario"] = ordered_json::parse(scenario_to_json(config));
  doc["overrides"] = overrides;
  const ordered_json body = ordered_json::parse(report_to_json(report));
  for (const auto& [key, val] : body.items()) doc[key] = val;
  write_file(dir / "report.json", [&](std::ostream& o) { o << doc.dump(2) << '\n'; });
  out << "slots=" << report.series.size() << " served_pairs=" << report.served_pair_count
      << " handovers=" << report.total_handovers << " gap_limited=" << report.gap_limited_slots
      << '\n';
  return 0;
}

int linkbudget(double elev_a, double elev_b, double altitude_km, double irradiance,
               double zenith, double cloud, const std::string& config_path, std::ostream& out) {
  ScenarioConfig config;
  if (!config_path.empty()) config = load_scenario(config_path);
  const double altitude = altitude_km > 0 ? altitude_km * 1e3 : config.constellation.altitude_m;
  const double re = config.constellation.earth_radius_m;
  WeatherRecord w{"_", 1, 0, zenith, cloud, irradiance};
  validate(w);
  auto budget = [&](double elev) {
    if (!(elev >= 0.0 && elev <= 90.0)) throw ConfigError(kComponent, "elevation must lie in [0, 90]");
    const double e = deg2rad(elev);
    const double r = re + altitude;
    const double slant = std::sqrt(r * r - re * re * std::cos(e) * std::cos(e)) - re * std::sin(e);
    const double fs = free_space_transmissivity(config.link.optics, slant);
    const double atm = effective_transmissivity(w, elev);
    ArmChannel arm{arm_transmissivity(fs, atm, config.link.optics.tx_efficiency,
                                      config.link.optics.rx_efficiency),
                   dark_click_prob(irradiance, config.link.detector, config.link.optics)};
    return std::pair{slant, arm};
  };
  const auto [sa, arm_a] = budget(elev_a);
  const auto [sb, arm_b] = budget(elev_b);
  const auto outcome = end_to_end_outcome(config.link.source, arm_a, arm_b);
  ordered_json doc;
  doc["arm_a"] = {{"elevation_deg", elev_a}, {"slant_range_m", sa},
                  {"transmissivity", arm_a.transmissivity}, {"dark_click_prob", arm_a.dark_click_prob}};
  doc["arm_b"] = {{"elevation_deg", elev_b}, {"slant_range_m", sb},
                  {"transmissivity", arm_b.transmissivity}, {"dark_click_prob", arm_b.dark_click_prob}};
  doc["success_prob"] = outcome.success_prob;
  doc["fidelity"] = outcome.fidelity;
  doc["edr"] = outcome.edr;
  doc["gated_edr"] = gated_rate(outcome, elev_a, elev_b, config.link);
  out << doc.dump(2) << '\n';
  return 0;
}

int validate_files(const std::string& config_path, const std::string& weather_path,
                   std::ostream& out) {
  ScenarioConfig config = load_scenario(config_path);
  if (!weather_path.empty()) config.weather_path = weather_path;
  const EnvironmentTable table = load_environment(config);
  for (const auto& s : config.stations) {
    if (!table.covers(s.id, config.month)) {
      throw IngestionError("environment", "no weather for station " + s.id + " in month " +
                                              std::to_string(config.month));
    }
  }
  out << "ok: " << config.stations.size() << " stations, "
      << make_network(config).pairs.size() << " pairs, " << table.size() << " weather records\n";
  return 0;
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Satellite entanglement-distribution scheduler", "qsched"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  auto* sim = app.add_subcommand("simulate", "Run a scenario and write metrics");
  sim->add_option("--config", config_path, "Scenario JSON")->required();
  sim->add_option("--out", out_dir, "Output directory")->required();
  sim->add_option("--set", overrides, "Override key=value (repeatable)");

  std::string baselines = "0:3000:250";
  double cs_altitude = 1000.0;
  CaseStudyParams cs;
  auto* csc = app.add_subcommand("casestudy", "Two-station relay study over baselines");
  csc->add_option("--baselines", baselines, "start:stop:step in km");
  csc->add_option("--altitude", cs_altitude, "Orbit altitude in km");
  csc->add_option("--theta-e", cs.min_elevation_deg, "Minimum elevation in degrees");
  csc->add_option("--mirror-efficiency", cs.mirror_efficiency);
  csc->add_option("--zenith-transmissivity", cs.zenith_transmissivity);
  csc->add_option("--phase-samples", cs.phase_samples);
  csc->add_option("--out", out_dir, "Output directory")->required();

  double elev_a = 90.0, elev_b = 90.0, lb_altitude = 0.0, irradiance = 0.0, zenith = 1.0, cloud = 0.0;
  auto* lb = app.add_subcommand("linkbudget", "Evaluate one dual-downlink configuration");
  lb->add_option("--config", config_path, "Scenario JSON for physics parameters");
  lb->add_option("--elevation-a", elev_a);
  lb->add_option("--elevation-b", elev_b);
  lb->add_option("--altitude", lb_altitude, "Orbit altitude in km (default: scenario)");
  lb->add_option("--irradiance", irradiance, "uW cm^-2 sr^-1 nm^-1");
  lb->add_option("--zenith-transmissivity", zenith);
  lb->add_option("--cloud", cloud);

  std::uint64_t seed = 7;
  std::string stations_path;
  std::string weather_out;
  std::string months = "1:12:1";
  auto* ws = app.add_subcommand("weather-synth", "Write a synthetic weather table");
  ws->add_option("--seed", seed);
  ws->add_option("--stations", stations_path, "Station list or scenario JSON")->required();
  ws->add_option("--months", months, "start:stop:step");
  ws->add_option("--out", weather_out, "Output CSV")->required();

  std::string weather_path;
  auto* val = app.add_subcommand("validate", "Check a scenario and its weather table");
  val->add_option("--config", config_path, "Scenario JSON")->required();
  val->add_option("--weather", weather_path, "Weather CSV (default: scenario)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (*sim) return simulate(config_path, out_dir, overrides, out);
    if (*csc) {
      cs.altitude_m = cs_altitude * 1e3;
      std::vector<double> baselines_m;
      for (double km : parse_range(baselines)) baselines_m.push_back(km * 1e3);
      const auto points = case_study_sweep(baselines_m, cs);
      ensure_dir(out_dir);
      write_file(std::filesystem::path(out_dir) / "case_study.csv",
                 [&](std::ostream& o) { write_case_study_csv(points, o); });
      out << "rows=" << points.size() << '\n';
      return 0;
    }
    if (*lb) return linkbudget(elev_a, elev_b, lb_altitude, irradiance, zenith, cloud, config_path, out);
    if (*ws) {
      std::vector<int> month_list;
      for (double m : parse_range(months)) {
        if (m != std::floor(m) || m < 1 || m > 12) throw ConfigError(kComponent, "months must lie in 1..12");
        month_list.push_back(static_cast<int>(m));
      }
      const auto table = synth_weather(seed, load_stations(stations_path), month_list);
      save_weather(table, weather_out);
      out << "records=" << table.size() << '\n';
      return 0;
    }
    if (*val) return validate_files(config_path, weather_path, out);
  } catch (const Error& e) {
    err << "qsched: " << e.component() << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "qsched: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace qsched::cli
