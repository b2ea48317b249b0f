#pragma once

// Batch front end: scenario files, overrides and subcommand dispatch.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "qsched/simharness.hpp"

namespace qsched::cli {

// Parses a scenario document. Missing fields keep their defaults; unknown
// keys and out-of-range values throw ConfigError naming the field.
// Overrides are "key=value" with dotted keys for nested objects; values are
// read as JSON, falling back to a plain string. A relative weather path is
// resolved against base_dir.
ScenarioConfig parse_scenario(std::string_view json_text,
                              const std::vector<std::string>& overrides = {},
                              const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides = {});

std::string scenario_to_json(const ScenarioConfig& config);
void save_scenario(const ScenarioConfig& config, const std::filesystem::path& path);

// "start:stop:step", stop included.
std::vector<double> parse_range(std::string_view range);

// Exit codes: 0 success, 1 configuration/ingestion/runtime error, 2 usage.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qsched::cli
