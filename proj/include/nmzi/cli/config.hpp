#pragma once

// Flat run configuration: one `dotted.key = value` per line, '#' comments.
//
//   beam.sigma = 1
//   mirror.A.amplitude = 0.001        # also frequency_hz, phase_rad, enabled
//   network.tuning = destructive
//   network.transmission.F->D = 1
//   plan.sample_rate_hz = 8192        # also samples, detector, noise_rms, noise_seed
//   analysis.threshold_db = -40
//   ti.epsilon = 0.01                 # also y_half_width, y_points
//   dce.screen_points = 64

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "nmzi/errors.hpp"
#include "nmzi/interferometer.hpp"
#include "nmzi/weakmeas.hpp"

namespace nmzi::cli {

struct RunConfig {
  double sigma = 1.0;
  std::vector<weakmeas::MirrorDither> dithers = weakmeas::default_dithers(1e-3);
  interferometer::Tuning tuning = interferometer::Tuning::Destructive;
  std::array<double, interferometer::kSegments.size()> transmissions{1.0, 1.0, 1.0, 1.0, 1.0};
  weakmeas::SimPlan plan;
  double threshold_db = weakmeas::kDefaultThresholdDb;
  double epsilon = 0.01;
  double y_half_width = 8.0;  ///< in units of 1/sigma
  std::size_t y_points = 257;
  std::size_t screen_points = 64;

  interferometer::NetworkConfig network() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parse failure carrying the 1-based line and the offending key.
class ConfigParseError : public ConfigError {
 public:
  ConfigParseError(std::size_t line, std::string field, const std::string& message);

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

/// Applies the file's keys on top of the defaults.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text for a config; parse_config(format_config(c)) == c.
std::string format_config(const RunConfig& config);

}  // namespace nmzi::cli
