// nmzi: scenario runner for the nested Mach-Zehnder simulator.
//
//   nmzi run <scenario> [--config FILE] [--out DIR] [--threshold-db X] [--detector centroid|quadcell]
//   nmzi render <spectrum.csv> [--config FILE] [--width N] [--threshold-db X]
//   nmzi scenarios
//
// Exit codes: 0 success, 2 configuration/usage error, 3 scenario failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "nmzi/cli/config.hpp"
#include "nmzi/cli/render.hpp"
#include "nmzi/cli/scenario.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitScenario = 3;

nmzi::cli::RunConfig base_config(const std::string& path) {
  return path.empty() ? nmzi::cli::RunConfig{} : nmzi::cli::load_config(path);
}

int cmd_run(const std::string& scenario_name, const std::string& config_path, const std::string& out_dir,
            std::optional<double> threshold_db, const std::string& detector) {
  nmzi::cli::Scenario scenario;
  nmzi::cli::RunConfig config;
  try {
    scenario = nmzi::cli::parse_scenario(scenario_name);
    config = base_config(config_path);
    if (threshold_db) {
      if (!(*threshold_db < 0.0)) throw nmzi::ConfigError("--threshold-db must be negative");
      config.threshold_db = *threshold_db;
    }
    if (!detector.empty()) {
      const auto d = nmzi::weakmeas::parse_detector(detector);
      if (!d) throw nmzi::ConfigError("--detector must be centroid or quadcell");
      config.plan.detector = *d;
    }
  } catch (const nmzi::ConfigError& e) {
    std::cerr << "nmzi: config error: " << (config_path.empty() ? "" : config_path + ": ") << e.what() << "\n";
    return kExitConfig;
  }

  try {
    for (const auto& w : nmzi::weakmeas::dither_warnings(config.dithers, config.sigma)) {
      std::cerr << "nmzi: warning: " << w << "\n";
    }
    const auto report = nmzi::cli::run(scenario, config, out_dir);
    std::cout << "scenario      " << report.scenario << "\n"
              << "input digest  " << report.input_digest << "\n"
              << "report digest " << report.report_digest << "\n";
    for (const auto& p : report.artifacts) std::cout << "wrote         " << p.string() << "\n";
    if (report.body["results"].contains("verdicts")) {
      for (const auto& [mirror, v] : report.body["results"]["verdicts"].items()) {
        std::cout << "  " << mirror << ": " << v.get<std::string>() << "\n";
      }
    }
    if (report.body["results"].contains("weights")) {
      for (const auto& [absorber, w] : report.body["results"]["weights"].items()) {
        std::cout << "  " << absorber << ": " << w.get<double>() << "\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "nmzi: scenario " << scenario.name() << " failed: " << e.what() << "\n";
    return kExitScenario;
  }
  return 0;
}

int cmd_render(const std::string& csv_path, const std::string& config_path, std::size_t width,
               std::optional<double> threshold_db) {
  try {
    const auto config = base_config(config_path);
    std::ifstream in(csv_path);
    if (!in) throw nmzi::ConfigError("cannot open " + csv_path);
    const auto spectrum = nmzi::cli::read_spectrum_csv(in);
    std::vector<nmzi::cli::SpectrumMarker> markers;
    for (const auto& d : config.dithers) {
      markers.push_back({std::string(nmzi::interferometer::to_string(d.mirror)), d.frequency_hz});
    }
    std::cout << nmzi::cli::render_spectrum(spectrum, markers, width, threshold_db.value_or(config.threshold_db));
  } catch (const nmzi::ConfigError& e) {
    std::cerr << "nmzi: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "nmzi: render failed: " << e.what() << "\n";
    return kExitScenario;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nested Mach-Zehnder weak-measurement and transaction simulator"};
  app.require_subcommand(1);

  std::string scenario, config_path, out_dir = "out", detector, csv_path;
  std::optional<double> threshold_db;
  std::size_t width = 72;

  auto* run = app.add_subcommand("run", "run a scenario and write its artifacts");
  run->add_option("scenario", scenario, "scenario name (see `nmzi scenarios`)")->required();
  run->add_option("--config", config_path, "key = value config file");
  run->add_option("--out", out_dir, "output directory")->capture_default_str();
  run->add_option("--threshold-db", threshold_db, "signal threshold relative to the strongest line");
  run->add_option("--detector", detector, "centroid or quadcell");

  auto* render = app.add_subcommand("render", "ASCII chart of a spectrum.csv");
  render->add_option("spectrum", csv_path, "spectrum.csv from a run")->required();
  render->add_option("--config", config_path, "config whose mirror frequencies annotate the chart");
  render->add_option("--width", width, "chart width in columns (>= 40)")->capture_default_str();
  render->add_option("--threshold-db", threshold_db, "threshold marker position");

  auto* list = app.add_subcommand("scenarios", "list scenario names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*run) return cmd_run(scenario, config_path, out_dir, threshold_db, detector);
  if (*render) return cmd_render(csv_path, config_path, width, threshold_db);
  if (*list) {
    for (const auto& s : nmzi::cli::scenario_catalog()) std::cout << s.name << "\t" << s.description << "\n";
  }
  return 0;
}
