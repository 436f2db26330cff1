#include "nmzi/interferometer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "nmzi/errors.hpp"

namespace nmzi::interferometer {
namespace {

using modes::Complex;
using modes::GaussianBranch;
using modes::TransverseState;

constexpr double kInnerSplit = 1.0 / std::numbers::sqrt2;

void add_branch(std::vector<GaussianBranch>& out, double coeff, double shift) {
  if (coeff != 0.0) out.push_back({Complex{coeff, 0.0}, shift});
}

}  // namespace

std::string_view to_string(Mirror m) {
  switch (m) {
    case Mirror::A: return "A";
    case Mirror::B: return "B";
    case Mirror::C: return "C";
    case Mirror::E: return "E";
    case Mirror::F: return "F";
  }
  return "?";
}

std::string_view to_string(Port p) {
  switch (p) {
    case Port::D: return "D";
    case Port::DarkOuter: return "Dark_outer";
    case Port::DarkInner: return "Dark_inner";
  }
  return "?";
}

std::string_view to_string(Segment s) {
  switch (s) {
    case Segment::EToInner: return "E->inner";
    case Segment::AToOut: return "A->out";
    case Segment::BToOut: return "B->out";
    case Segment::FToD: return "F->D";
    case Segment::CToD: return "C->D";
  }
  return "?";
}

std::string_view to_string(Tuning t) {
  return t == Tuning::Destructive ? "destructive" : "constructive";
}

std::optional<Mirror> parse_mirror(std::string_view s) {
  for (auto m : kMirrors) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

std::optional<Segment> parse_segment(std::string_view s) {
  std::string ascii(s);
  if (auto pos = ascii.find("→"); pos != std::string::npos) ascii.replace(pos, std::string_view("→").size(), "->");
  for (auto seg : kSegments) {
    if (to_string(seg) == ascii) return seg;
  }
  return std::nullopt;
}

std::optional<Tuning> parse_tuning(std::string_view s) {
  if (s == "destructive") return Tuning::Destructive;
  if (s == "constructive") return Tuning::Constructive;
  return std::nullopt;
}

bool NetworkConfig::lossless() const {
  return std::all_of(transmissions.begin(), transmissions.end(), [](double t) { return t == 1.0; });
}

void NetworkConfig::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be positive and finite");
  const double norm = outer_split[0] * outer_split[0] + outer_split[1] * outer_split[1];
  if (!(std::abs(norm - 1.0) <= 1e-12)) {
    throw DomainError("outer split amplitudes must satisfy |t|^2 + |r|^2 = 1");
  }
  for (auto s : kSegments) {
    const double t = transmission(s);
    if (!(t >= 0.0 && t <= 1.0)) {
      throw DomainError("transmission of segment " + std::string(to_string(s)) + " outside [0, 1]");
    }
  }
}

TiltAssignment TiltAssignment::scaled(double factor) const {
  TiltAssignment out = *this;
  for (auto& k : out.kappa_) k *= factor;
  return out;
}

double TiltAssignment::max_abs() const {
  double m = 0.0;
  for (double k : kappa_) m = std::max(m, std::abs(k));
  return m;
}

const modes::TransverseState& ExitStates::at(Port p) const {
  switch (p) {
    case Port::D: return detector;
    case Port::DarkOuter: return dark_outer;
    case Port::DarkInner: return dark_inner;
  }
  return detector;
}

ExitStates propagate(const NetworkConfig& config, const TiltAssignment& tilts) {
  config.validate();
  const double t = config.outer_split[0];
  const double r = config.outer_split[1];
  const double b_to_f = config.inner_tuning == Tuning::Destructive ? -kInnerSplit : kInnerSplit;
  const double b_to_dark = config.inner_tuning == Tuning::Destructive ? kInnerSplit : -kInnerSplit;

  std::vector<GaussianBranch> d, dark_outer, dark_inner;

  // C arm straight to the final merge.
  const double c_amp = t * config.transmission(Segment::CToD);
  const double c_shift = tilts[Mirror::C];
  add_branch(d, c_amp * t, c_shift);
  add_branch(dark_outer, c_amp * r, c_shift);

  // E arm into the inner interferometer.
  const double inner_amp = r * config.transmission(Segment::EToInner) * kInnerSplit;
  const double a_amp = inner_amp * config.transmission(Segment::AToOut);
  const double b_amp = inner_amp * config.transmission(Segment::BToOut);
  const double a_shift = tilts[Mirror::E] + tilts[Mirror::A];
  const double b_shift = tilts[Mirror::E] + tilts[Mirror::B];

  const double f_gain = config.transmission(Segment::FToD);
  const double a_via_f = a_amp * kInnerSplit * f_gain;
  const double b_via_f = b_amp * b_to_f * f_gain;
  const double f_tilt = tilts[Mirror::F];
  add_branch(d, a_via_f * r, a_shift + f_tilt);
  add_branch(d, b_via_f * r, b_shift + f_tilt);
  add_branch(dark_outer, a_via_f * -t, a_shift + f_tilt);
  add_branch(dark_outer, b_via_f * -t, b_shift + f_tilt);

  add_branch(dark_inner, a_amp * kInnerSplit, a_shift);
  add_branch(dark_inner, b_amp * b_to_dark, b_shift);

  return {TransverseState(config.sigma, std::move(d)), TransverseState(config.sigma, std::move(dark_outer)),
          TransverseState(config.sigma, std::move(dark_inner))};
}

ConservationReport conservation_report(const NetworkConfig& config, const TiltAssignment& tilts) {
  const auto exits = propagate(config, tilts);
  ConservationReport report;
  report.lossy = !config.lossless();
  for (auto p : kPorts) {
    const auto& state = exits.at(p);
    if (!state.empty()) report.total += modes::total_probability(state, modes::default_grid(state));
  }
  return report;
}

modes::TransverseState first_order_state(const TiltAssignment& tilts, double sigma) {
  const double shift = tilts[Mirror::C] + tilts[Mirror::A] - tilts[Mirror::B];
  return TransverseState(sigma, {{Complex{1.0 / 3.0, 0.0}, shift}});
}

NetworkConfig set_gap(const NetworkConfig& config, Segment segment, double transmission) {
  if (!(transmission >= 0.0 && transmission <= 1.0)) {
    throw DomainError("segment transmission must lie in [0, 1]");
  }
  NetworkConfig out = config;
  out.transmissions[static_cast<std::size_t>(segment)] = transmission;
  return out;
}

NetworkConfig set_gap(const NetworkConfig& config, std::string_view segment, double transmission) {
  const auto seg = parse_segment(segment);
  if (!seg) throw ConfigError("unknown segment label '" + std::string(segment) + "'");
  return set_gap(config, *seg, transmission);
}

}  // namespace nmzi::interferometer
