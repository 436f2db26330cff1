#include "nmzi/cli/scenario.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <fstream>
#include <memory>

#include "nmzi/errors.hpp"
#include "nmzi/transactional.hpp"

namespace nmzi::cli {
namespace {

using interferometer::Mirror;
using interferometer::Segment;
using json = nlohmann::ordered_json;

constexpr std::string_view kTimeseriesSchema = "t,signal;v1";
constexpr std::string_view kSpectrumSchema = "freq_hz,power;v1";
constexpr std::string_view kBornSchema = "y,weight,leading_order;v1";

// Tilt pattern (in units of kappa_max) for the first-order check; generic so
// that no mirror combination cancels.
constexpr std::array<std::pair<Mirror, double>, 5> kFirstOrderPattern{{
    {Mirror::A, 1.0}, {Mirror::B, -0.5}, {Mirror::C, 0.3}, {Mirror::E, 0.7}, {Mirror::F, -0.4}}};
constexpr std::array kFirstOrderKappaMax{0.04, 0.02, 0.01};

class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

  void write(const std::string& name, const std::string& bytes) {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    out << bytes;
    if (!out) throw std::runtime_error("failed writing " + (dir_ / name).string());
    paths_.push_back(dir_ / name);
    manifest_.push_back({{"file", name}, {"sha256", sha256_hex(bytes)}});
  }

  const std::vector<std::filesystem::path>& paths() const { return paths_; }
  const json& manifest() const { return manifest_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> paths_;
  json manifest_ = json::array();
};

template <typename Row>
std::string csv(std::string_view header, std::size_t n, Row&& row) {
  std::string out(header);
  out += '\n';
  for (std::size_t i = 0; i < n; ++i) {
    row(out, i);
    out += '\n';
  }
  return out;
}

json config_object(const RunConfig& config) {
  json out = json::object();
  const std::string text = format_config(config);
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto eol = rest.find('\n');
    const auto line = rest.substr(0, eol);
    rest = eol == std::string_view::npos ? std::string_view{} : rest.substr(eol + 1);
    const auto eq = line.find(" = ");
    if (eq != std::string_view::npos) out[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 3));
  }
  return out;
}

json run_dither(const RunConfig& cfg, ArtifactWriter& files, json& schemas) {
  const auto net = cfg.network();
  const auto series = weakmeas::simulate(net, cfg.dithers, cfg.plan);
  const auto spectrum = weakmeas::power_spectrum(series.signal, cfg.plan);
  const auto verdict = weakmeas::classify_signals(spectrum, cfg.dithers, cfg.threshold_db);

  files.write("timeseries.csv", csv("t,signal", series.t.size(), [&](std::string& out, std::size_t i) {
                out += fmt::format("{},{}", series.t[i], series.signal[i]);
              }));
  files.write("spectrum.csv", csv("freq_hz,power", spectrum.power.size(), [&](std::string& out, std::size_t i) {
                out += fmt::format("{},{}", spectrum.freqs_hz[i], spectrum.power[i]);
              }));
  schemas["timeseries.csv"] = kTimeseriesSchema;
  schemas["spectrum.csv"] = kSpectrumSchema;

  json verdicts = json::object();
  json peaks_db = json::object();
  json peak_power = json::object();
  for (const auto& [mirror, mv] : verdict.mirrors) {
    const std::string m(interferometer::to_string(mirror));
    verdicts[m] = mv.presence == weakmeas::Presence::Present ? "present" : "absent";
    peaks_db[m] = mv.peak_db;
    peak_power[m] = mv.peak_power;
  }
  return {{"detector", weakmeas::to_string(cfg.plan.detector)},
          {"threshold_db", verdict.threshold_db},
          {"verdicts", verdicts},
          {"peaks_db", peaks_db},
          {"peak_power", peak_power},
          {"warnings", weakmeas::dither_warnings(cfg.dithers, cfg.sigma)}};
}

json transactions_json(std::span<const transactional::IncipientTransaction> its) {
  json out = json::array();
  for (const auto& it : its) {
    json diag = json::object();
    for (const auto& [idx, v] : it.projector.entries()) {
      if (idx.first == idx.second) diag[idx.first] = v.real();
    }
    json row = {{"absorber", it.absorber}, {"weight", it.weight}, {"projector_diagonal", diag}};
    if (it.screen_position) row["x"] = *it.screen_position;
    out.push_back(std::move(row));
  }
  return out;
}

json amp_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

json run_dce_whichway() {
  const auto psi = transactional::dce_state();
  const std::vector<transactional::PathLabel> absorbers{"A", "B"};
  const auto its = transactional::incipient_transactions(psi, absorbers);
  json weights = json::object();
  json offers = json::object();
  json confirmations = json::object();
  for (const auto& label : absorbers) {
    offers[label] = amp_json(transactional::offer_component(psi, label)[label]);
    confirmations[label] = amp_json(transactional::confirmation(psi, label)[label]);
  }
  for (const auto& it : its) weights[it.absorber] = it.weight;
  return {{"weights", weights},
          {"offer_components", offers},
          {"confirmations", confirmations},
          {"kolmogorov_residual", transactional::weights_born_rule_check(psi, absorbers)},
          {"transactions", transactions_json(its)}};
}

json run_dce_bothways(const RunConfig& cfg) {
  const auto screen = transactional::phase_ramp_screen(cfg.screen_points);
  const auto its = transactional::dce_both_ways(transactional::dce_state(), screen);
  double total = 0.0;
  for (const auto& it : its) total += it.weight;
  return {{"screen_points", cfg.screen_points},
          {"fringe_visibility", transactional::fringe_visibility(its)},
          {"total_weight", total},
          {"transactions", transactions_json(its)}};
}

json run_ti_weights(const RunConfig& cfg, ArtifactWriter& files, json& schemas) {
  const modes::TransverseState psi(cfg.sigma, {{1.0, 0.0}});
  const auto ow = transactional::dfbv_attenuated_ow(cfg.epsilon, psi);
  const double half = cfg.y_half_width / cfg.sigma;
  const double dy = 2.0 * half / static_cast<double>(cfg.y_points - 1);

  std::vector<double> ys(cfg.y_points), weights(cfg.y_points), leading(cfg.y_points);
  double grid_sum = 0.0;
  double max_rel_dev = 0.0;
  for (std::size_t j = 0; j < cfg.y_points; ++j) {
    ys[j] = -half + static_cast<double>(j) * dy;
    const auto bw = transactional::dfbv_born_weight_at(ow, ys[j]);
    weights[j] = bw.weight;
    leading[j] = std::norm(modes::position_eval(psi, ys[j])) / 3.0;
    const double w = (j == 0 || j + 1 == cfg.y_points) ? 0.5 : 1.0;
    grid_sum += w * bw.weight * dy;
    if (leading[j] > 0.0) max_rel_dev = std::max(max_rel_dev, std::abs(weights[j] / leading[j] - 1.0));
  }

  files.write("born_weights.csv", csv("y,weight,leading_order", ys.size(), [&](std::string& out, std::size_t i) {
                out += fmt::format("{},{},{}", ys[i], weights[i], leading[i]);
              }));
  schemas["born_weights.csv"] = kBornSchema;

  json path = json::object();
  for (const auto& [label, a] : ow.path.amplitudes()) path[label] = amp_json(a);
  const auto cw = transactional::dfbv_born_weight_at(ow, 0.0).cw;
  json cw_bra = json::object();
  for (const auto& [label, a] : cw.detector.amplitudes()) cw_bra[label] = amp_json(a);

  return {{"epsilon", cfg.epsilon},
          {"offer_path", path},
          {"confirmation_at_y0", {{"amplitude", amp_json(cw.amplitude)}, {"detector_bra", cw_bra}}},
          {"detection_probability", transactional::dfbv_detection_probability(ow)},
          {"weight_grid_sum", grid_sum},
          {"max_relative_deviation_from_leading_order", max_rel_dev}};
}

json run_firstorder(const RunConfig& cfg) {
  const auto net = cfg.network();
  json rows = json::array();
  double previous = 0.0;
  for (double kmax : kFirstOrderKappaMax) {
    interferometer::TiltAssignment tilts;
    for (const auto& [m, w] : kFirstOrderPattern) tilts[m] = w * kmax * cfg.sigma;
    const double exact = modes::centroid(interferometer::propagate(net, tilts).detector);
    const double linear = modes::centroid(interferometer::first_order_state(tilts, cfg.sigma));
    const double discrepancy = std::abs(exact - linear);
    json row = {{"kappa_max_sigma", kmax}, {"centroid", exact}, {"first_order", linear}, {"discrepancy", discrepancy}};
    if (previous > 0.0) row["reduction_factor"] = previous / discrepancy;
    previous = discrepancy;
    rows.push_back(std::move(row));
  }
  json pattern = json::object();
  for (const auto& [m, w] : kFirstOrderPattern) pattern[std::string(interferometer::to_string(m))] = w;
  return {{"tilt_pattern", pattern}, {"rows", rows}};
}

}  // namespace

std::string Scenario::name() const {
  switch (kind) {
    case ScenarioKind::Aligned: return "aligned";
    case ScenarioKind::Destructive: return "destructive";
    case ScenarioKind::Gap: return "gap";
    case ScenarioKind::Blocked: return "blocked:" + std::string(interferometer::to_string(blocked));
    case ScenarioKind::DceWhichway: return "dce-whichway";
    case ScenarioKind::DceBothways: return "dce-bothways";
    case ScenarioKind::TiWeights: return "ti-weights";
    case ScenarioKind::FirstorderCheck: return "firstorder-check";
  }
  return "?";
}

bool Scenario::is_dither() const {
  return kind == ScenarioKind::Aligned || kind == ScenarioKind::Destructive || kind == ScenarioKind::Gap ||
         kind == ScenarioKind::Blocked;
}

Scenario parse_scenario(std::string_view name) {
  if (name.starts_with("blocked:")) {
    const auto label = name.substr(std::string_view("blocked:").size());
    const auto seg = interferometer::parse_segment(label);
    if (!seg) throw ConfigError("unknown segment in scenario '" + std::string(name) + "'");
    return {ScenarioKind::Blocked, *seg};
  }
  static constexpr std::array<std::pair<std::string_view, ScenarioKind>, 7> kNames{{
      {"aligned", ScenarioKind::Aligned},
      {"destructive", ScenarioKind::Destructive},
      {"gap", ScenarioKind::Gap},
      {"dce-whichway", ScenarioKind::DceWhichway},
      {"dce-bothways", ScenarioKind::DceBothways},
      {"ti-weights", ScenarioKind::TiWeights},
      {"firstorder-check", ScenarioKind::FirstorderCheck},
  }};
  for (const auto& [n, k] : kNames) {
    if (n == name) return {k, Segment::FToD};
  }
  throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

std::vector<ScenarioInfo> scenario_catalog() {
  return {
      {"aligned", "inner interferometer tuned constructive; every dithered mirror shows up"},
      {"destructive", "inner interferometer tuned dark toward F; signals from A, B, C only"},
      {"gap", "F->D segment removed; only the C-arm signal survives"},
      {"blocked:<segment>", "zero transmission on one segment (E->inner, A->out, B->out, F->D, C->D)"},
      {"dce-whichway", "delayed-choice which-way absorbers: incipient transactions on A and B"},
      {"dce-bothways", "delayed-choice screen: interference fringe of incipient transactions"},
      {"ti-weights", "two-degree-of-freedom offer wave at D and its Born weights over y"},
      {"firstorder-check", "exact D-port centroid against the first-order shift kC + kA - kB"},
  };
}

RunConfig effective_config(const Scenario& scenario, RunConfig config) {
  auto zero = [&](Segment s) { config.transmissions[static_cast<std::size_t>(s)] = 0.0; };
  switch (scenario.kind) {
    case ScenarioKind::Aligned: config.tuning = interferometer::Tuning::Constructive; break;
    case ScenarioKind::Destructive: config.tuning = interferometer::Tuning::Destructive; break;
    case ScenarioKind::Gap:
      config.tuning = interferometer::Tuning::Destructive;
      zero(Segment::FToD);
      break;
    case ScenarioKind::Blocked: zero(scenario.blocked); break;
    case ScenarioKind::FirstorderCheck: config.tuning = interferometer::Tuning::Destructive; break;
    case ScenarioKind::DceWhichway:
    case ScenarioKind::DceBothways:
    case ScenarioKind::TiWeights: break;
  }
  return config;
}

RunReport run(const Scenario& scenario, const RunConfig& config, const std::filesystem::path& out_dir) {
  const RunConfig cfg = effective_config(scenario, config);
  const std::string config_text = format_config(cfg);
  const std::string name = scenario.name();

  RunReport report;
  report.scenario = name;
  report.input_digest = sha256_hex(name + "\n" + config_text);

  ArtifactWriter files(out_dir);
  json schemas = json::object();
  json results;
  switch (scenario.kind) {
    case ScenarioKind::Aligned:
    case ScenarioKind::Destructive:
    case ScenarioKind::Gap:
    case ScenarioKind::Blocked: results = run_dither(cfg, files, schemas); break;
    case ScenarioKind::DceWhichway: results = run_dce_whichway(); break;
    case ScenarioKind::DceBothways: results = run_dce_bothways(cfg); break;
    case ScenarioKind::TiWeights: results = run_ti_weights(cfg, files, schemas); break;
    case ScenarioKind::FirstorderCheck: results = run_firstorder(cfg); break;
  }
  files.write("effective.conf", config_text);

  report.body = {{"tool", "nmzi"},
                 {"version", kToolVersion},
                 {"scenario", name},
                 {"input_digest", report.input_digest},
                 {"schemas", schemas},
                 {"effective_config", config_object(cfg)},
                 {"results", results},
                 {"artifacts", files.manifest()}};
  const std::string text = report.body.dump(2) + "\n";
  files.write("report.json", text);
  report.report_digest = sha256_hex(text);
  report.artifacts = files.paths();
  return report;
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  std::string out;
  for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
  return out;
}

}  // namespace nmzi::cli
