#include "nmzi/cli/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nmzi::cli {
namespace {

using interferometer::Mirror;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_dots(std::string_view key, std::size_t max_parts) {
  std::vector<std::string_view> parts;
  while (parts.size() + 1 < max_parts) {
    const auto dot = key.find('.');
    if (dot == std::string_view::npos) break;
    parts.push_back(key.substr(0, dot));
    key.remove_prefix(dot + 1);
  }
  parts.push_back(key);
  return parts;
}

class LineParser {
 public:
  LineParser(std::size_t line, std::string_view key, std::string_view value)
      : line_(line), key_(key), value_(value) {}

  [[noreturn]] void fail(const std::string& message) const { throw ConfigParseError(line_, std::string(key_), message); }

  double real() const {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(value_.data(), value_.data() + value_.size(), out);
    if (ec != std::errc{} || ptr != value_.data() + value_.size() || !std::isfinite(out)) {
      fail("expected a finite number, got '" + std::string(value_) + "'");
    }
    return out;
  }

  double real_in(double lo, double hi) const {
    const double v = real();
    if (!(v >= lo && v <= hi)) fail(fmt::format("value {} outside [{}, {}]", v, lo, hi));
    return v;
  }

  double positive() const {
    const double v = real();
    if (!(v > 0.0)) fail("value must be positive");
    return v;
  }

  std::uint64_t integer() const {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(value_.data(), value_.data() + value_.size(), out);
    if (ec != std::errc{} || ptr != value_.data() + value_.size()) {
      fail("expected a non-negative integer, got '" + std::string(value_) + "'");
    }
    return out;
  }

  bool boolean() const {
    if (value_ == "true") return true;
    if (value_ == "false") return false;
    fail("expected true or false, got '" + std::string(value_) + "'");
  }

  std::string_view text() const { return value_; }

 private:
  std::size_t line_;
  std::string_view key_;
  std::string_view value_;
};

weakmeas::MirrorDither& dither_for(RunConfig& config, Mirror m) {
  auto it = std::find_if(config.dithers.begin(), config.dithers.end(), [&](const auto& d) { return d.mirror == m; });
  if (it != config.dithers.end()) return *it;
  config.dithers.push_back({m, 0.0, weakmeas::default_frequency(m), 0.0});
  std::sort(config.dithers.begin(), config.dithers.end(),
            [](const auto& a, const auto& b) { return a.mirror < b.mirror; });
  return dither_for(config, m);
}

void apply_mirror_key(RunConfig& config, Mirror m, std::string_view field, const LineParser& p) {
  if (field == "enabled") {
    if (p.boolean()) {
      dither_for(config, m);
    } else {
      std::erase_if(config.dithers, [&](const auto& d) { return d.mirror == m; });
    }
    return;
  }
  auto& d = dither_for(config, m);
  if (field == "amplitude") {
    d.amplitude = p.real_in(0.0, INFINITY);
  } else if (field == "frequency_hz") {
    d.frequency_hz = p.positive();
  } else if (field == "phase_rad") {
    d.phase_rad = p.real();
  } else {
    p.fail("unknown mirror field");
  }
}

void apply_key(RunConfig& config, std::string_view key, const LineParser& p) {
  if (key == "beam.sigma") {
    config.sigma = p.positive();
  } else if (key.starts_with("mirror.")) {
    const auto parts = split_dots(key, 3);
    if (parts.size() != 3) p.fail("expected mirror.<A|B|C|E|F>.<field>");
    const auto m = interferometer::parse_mirror(parts[1]);
    if (!m) p.fail("unknown mirror '" + std::string(parts[1]) + "'");
    apply_mirror_key(config, *m, parts[2], p);
  } else if (key == "network.tuning") {
    const auto t = interferometer::parse_tuning(p.text());
    if (!t) p.fail("expected destructive or constructive");
    config.tuning = *t;
  } else if (key.starts_with("network.transmission.")) {
    const auto label = key.substr(std::string_view("network.transmission.").size());
    const auto seg = interferometer::parse_segment(label);
    if (!seg) p.fail("unknown segment '" + std::string(label) + "'");
    config.transmissions[static_cast<std::size_t>(*seg)] = p.real_in(0.0, 1.0);
  } else if (key == "plan.sample_rate_hz") {
    config.plan.sample_rate_hz = p.positive();
  } else if (key == "plan.samples") {
    config.plan.n_samples = static_cast<std::size_t>(p.integer());
  } else if (key == "plan.detector") {
    const auto d = weakmeas::parse_detector(p.text());
    if (!d) p.fail("expected centroid or quadcell");
    config.plan.detector = *d;
  } else if (key == "plan.noise_rms") {
    config.plan.noise_rms = p.real_in(0.0, INFINITY);
  } else if (key == "plan.noise_seed") {
    config.plan.noise_seed = p.integer();
  } else if (key == "analysis.threshold_db") {
    const double v = p.real();
    if (!(v < 0.0)) p.fail("threshold must be negative dB");
    config.threshold_db = v;
  } else if (key == "ti.epsilon") {
    config.epsilon = p.real_in(0.0, 0.5);
  } else if (key == "ti.y_half_width") {
    config.y_half_width = p.positive();
  } else if (key == "ti.y_points") {
    const auto n = p.integer();
    if (n < 2) p.fail("need at least 2 points");
    config.y_points = static_cast<std::size_t>(n);
  } else if (key == "dce.screen_points") {
    const auto n = p.integer();
    if (n < 2) p.fail("need at least 2 points");
    config.screen_points = static_cast<std::size_t>(n);
  } else {
    p.fail("unknown key");
  }
}

}  // namespace

ConfigParseError::ConfigParseError(std::size_t line, std::string field, const std::string& message)
    : ConfigError(fmt::format("line {}: {}: {}", line, field, message)), line_(line), field_(std::move(field)) {}

interferometer::NetworkConfig RunConfig::network() const {
  interferometer::NetworkConfig net;
  net.sigma = sigma;
  net.inner_tuning = tuning;
  net.transmissions = transmissions;
  return net;
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigParseError(line_no, std::string(line), "expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigParseError(line_no, "", "missing key");
    if (value.empty()) throw ConfigParseError(line_no, std::string(key), "missing value");
    apply_key(config, key, LineParser(line_no, key, value));
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_config(const RunConfig& c) {
  std::string out;
  auto line = [&](std::string_view key, const auto& value) { out += fmt::format("{} = {}\n", key, value); };

  line("beam.sigma", c.sigma);
  for (auto m : interferometer::kMirrors) {
    const std::string prefix = fmt::format("mirror.{}.", interferometer::to_string(m));
    auto it = std::find_if(c.dithers.begin(), c.dithers.end(), [&](const auto& d) { return d.mirror == m; });
    if (it == c.dithers.end()) {
      line(prefix + "enabled", "false");
      continue;
    }
    line(prefix + "amplitude", it->amplitude);
    line(prefix + "frequency_hz", it->frequency_hz);
    line(prefix + "phase_rad", it->phase_rad);
  }
  line("network.tuning", interferometer::to_string(c.tuning));
  for (auto s : interferometer::kSegments) {
    line(fmt::format("network.transmission.{}", interferometer::to_string(s)),
         c.transmissions[static_cast<std::size_t>(s)]);
  }
  line("plan.sample_rate_hz", c.plan.sample_rate_hz);
  line("plan.samples", c.plan.n_samples);
  line("plan.detector", weakmeas::to_string(c.plan.detector));
  line("plan.noise_rms", c.plan.noise_rms);
  line("plan.noise_seed", c.plan.noise_seed);
  line("analysis.threshold_db", c.threshold_db);
  line("ti.epsilon", c.epsilon);
  line("ti.y_half_width", c.y_half_width);
  line("ti.y_points", c.y_points);
  line("dce.screen_points", c.screen_points);
  return out;
}

}  // namespace nmzi::cli
