#pragma once

// Command layer behind the CLI: configuration records with strict schemas,
// one function per command, deterministic artifact writing.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace lanemden::harness {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Commands: green, poisson, solve, eigen, sweep, bootstrap, classify.
const std::vector<std::string>& commands();

/// Default record for a command; it doubles as the schema (every accepted
/// key appears in it).
json defaults(const std::string& command);

struct RunConfig {
  std::string command;
  json values;  // defaults merged with the user's record
};

/// Merges `raw` over the defaults.  Unknown keys, wrong types and invalid
/// values raise ConfigError naming the offending key.
RunConfig parse_config(const std::string& command, const json& raw);

struct CommandResult {
  std::vector<std::filesystem::path> files;
  bool checks_passed = true;
  json summary;  // printed by the CLI
};

CommandResult cmd_green(const RunConfig& cfg);
CommandResult cmd_poisson(const RunConfig& cfg);
CommandResult cmd_solve(const RunConfig& cfg);
CommandResult cmd_eigen(const RunConfig& cfg);
CommandResult cmd_sweep(const RunConfig& cfg);
CommandResult cmd_bootstrap(const RunConfig& cfg);
CommandResult cmd_classify(const RunConfig& cfg);

CommandResult run(const RunConfig& cfg);

/// JSON artifact: `payload` plus {"config", "content_sha256"}, where the hash
/// covers the dump of payload and config.  Written with two-space indent.
void write_json_artifact(const std::filesystem::path& path, json payload, const RunConfig& cfg);
/// CSV artifact and its sidecar `path.json` {config, sha256, ...extra}.
void write_csv_artifact(const std::filesystem::path& path, const std::string& csv, const RunConfig& cfg,
                        json extra = json::object());

}  // namespace lanemden::harness
