#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nmzi/cli/config.hpp"

namespace nmzi::cli {

inline constexpr std::string_view kToolVersion = "1.0.0";

enum class ScenarioKind {
  Aligned,
  Destructive,
  Gap,
  Blocked,
  DceWhichway,
  DceBothways,
  TiWeights,
  FirstorderCheck,
};

struct Scenario {
  ScenarioKind kind = ScenarioKind::Destructive;
  interferometer::Segment blocked = interferometer::Segment::FToD;  ///< only for Blocked

  std::string name() const;
  /// Dither scenarios write timeseries.csv and spectrum.csv.
  bool is_dither() const;
};

/// Accepts the names listed by scenario_catalog(), with `blocked:<segment>`.
/// Throws ConfigError for anything else.
Scenario parse_scenario(std::string_view name);

struct ScenarioInfo {
  std::string name;
  std::string description;
};
std::vector<ScenarioInfo> scenario_catalog();

/// Config with the scenario's defining settings applied on top.
RunConfig effective_config(const Scenario& scenario, RunConfig config);

struct RunReport {
  std::string scenario;
  std::string input_digest;   ///< sha256 over scenario name and effective config text
  std::string report_digest;  ///< sha256 of report.json as written
  nlohmann::ordered_json body;
  std::vector<std::filesystem::path> artifacts;
};

/// Executes the scenario pipeline and writes its artifacts into out_dir
/// (created if needed). Library errors from the pipeline propagate.
RunReport run(const Scenario& scenario, const RunConfig& config, const std::filesystem::path& out_dir);

std::string sha256_hex(std::string_view bytes);

}  // namespace nmzi::cli
