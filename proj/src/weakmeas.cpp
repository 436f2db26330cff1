#include "nmzi/weakmeas.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>

#include "nmzi/errors.hpp"

namespace nmzi::weakmeas {
namespace {

constexpr double kWeakRegimeLimit = 0.1;  // fraction of sigma

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

// Mean-removed, Hann-windowed one-sided DFT (unnormalised).
std::vector<std::complex<double>> windowed_dft(std::span<const double> series, const SimPlan& plan) {
  if (series.size() != plan.n_samples) {
    throw PlanError("series length " + std::to_string(series.size()) + " does not match plan length " +
                    std::to_string(plan.n_samples));
  }
  if (!is_power_of_two(plan.n_samples)) throw PlanError("n_samples must be a power of two");

  const std::size_t n = series.size();
  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(n);

  struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
  };
  std::unique_ptr<double[], FftwFree> in(fftw_alloc_real(n));
  std::unique_ptr<fftw_complex[], FftwFree> out(fftw_alloc_complex(n / 2 + 1));
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
    in[i] = w * (series[i] - mean);
  }

  fftw_plan p;
  {
    std::lock_guard lock(planner_mutex());
    p = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
  }
  fftw_execute(p);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }

  std::vector<std::complex<double>> bins(n / 2 + 1);
  for (std::size_t k = 0; k < bins.size(); ++k) bins[k] = {out[k][0], out[k][1]};
  return bins;
}

}  // namespace

double default_frequency(Mirror m) {
  switch (m) {
    case Mirror::A: return 282.0;
    case Mirror::B: return 296.0;
    case Mirror::C: return 307.0;
    case Mirror::E: return 318.0;
    case Mirror::F: return 332.0;
  }
  return 0.0;
}

std::vector<MirrorDither> default_dithers(double amplitude) {
  std::vector<MirrorDither> out;
  for (auto m : interferometer::kMirrors) out.push_back({m, amplitude, default_frequency(m), 0.0});
  return out;
}

void validate_dithers(std::span<const MirrorDither> dithers) {
  for (std::size_t i = 0; i < dithers.size(); ++i) {
    const auto& d = dithers[i];
    const std::string name(interferometer::to_string(d.mirror));
    if (!(d.amplitude >= 0.0) || !std::isfinite(d.amplitude)) {
      throw ConfigError("mirror " + name + ": dither amplitude must be finite and >= 0");
    }
    if (!(d.frequency_hz > 0.0) || !std::isfinite(d.frequency_hz)) {
      throw ConfigError("mirror " + name + ": dither frequency must be positive");
    }
    if (!std::isfinite(d.phase_rad)) throw ConfigError("mirror " + name + ": dither phase must be finite");
    for (std::size_t j = 0; j < i; ++j) {
      if (dithers[j].mirror == d.mirror) throw ConfigError("mirror " + name + " is dithered twice");
      if (dithers[j].frequency_hz == d.frequency_hz) {
        throw ConfigError("mirrors " + std::string(interferometer::to_string(dithers[j].mirror)) + " and " + name +
                          " share a dither frequency");
      }
    }
  }
}

std::vector<std::string> dither_warnings(std::span<const MirrorDither> dithers, double sigma) {
  std::vector<std::string> out;
  for (const auto& d : dithers) {
    if (d.amplitude > kWeakRegimeLimit * sigma) {
      out.push_back("mirror " + std::string(interferometer::to_string(d.mirror)) + ": amplitude " +
                    std::to_string(d.amplitude) + " exceeds 0.1 sigma; first-order picture no longer applies");
    }
  }
  return out;
}

std::string_view to_string(DetectorModel m) { return m == DetectorModel::Centroid ? "centroid" : "quadcell"; }

std::optional<DetectorModel> parse_detector(std::string_view s) {
  if (s == "centroid") return DetectorModel::Centroid;
  if (s == "quadcell") return DetectorModel::Quadcell;
  return std::nullopt;
}

void SimPlan::validate(std::span<const MirrorDither> dithers) const {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) throw PlanError("sample rate must be positive");
  if (!is_power_of_two(n_samples)) throw PlanError("n_samples must be a power of two");
  if (!(noise_rms >= 0.0) || !std::isfinite(noise_rms)) throw PlanError("noise rms must be finite and >= 0");
  for (const auto& d : dithers) {
    if (!(sample_rate_hz > 2.0 * d.frequency_hz)) {
      throw PlanError("sample rate " + std::to_string(sample_rate_hz) + " Hz violates Nyquist for mirror " +
                      std::string(interferometer::to_string(d.mirror)) + " at " + std::to_string(d.frequency_hz) +
                      " Hz");
    }
  }
}

bool SignalVerdict::present(Mirror m) const {
  auto it = mirrors.find(m);
  return it != mirrors.end() && it->second.presence == Presence::Present;
}

interferometer::TiltAssignment tilts_at(std::span<const MirrorDither> dithers, double t) {
  interferometer::TiltAssignment tilts;
  for (const auto& d : dithers) {
    tilts[d.mirror] = d.amplitude * std::sin(2.0 * std::numbers::pi * d.frequency_hz * t + d.phase_rad);
  }
  return tilts;
}

double detector_reading(const modes::TransverseState& state, DetectorModel model) {
  // A dark detector reads zero.
  if (state.empty()) return 0.0;
  try {
    return model == DetectorModel::Centroid ? modes::centroid(state) : modes::quadcell(state);
  } catch (const UndefinedCentroidError&) {
    return 0.0;
  }
}

TimeSeries simulate(const interferometer::NetworkConfig& config, std::span<const MirrorDither> dithers,
                    const SimPlan& plan) {
  config.validate();
  validate_dithers(dithers);
  plan.validate(dithers);

  TimeSeries out;
  out.t.resize(plan.n_samples);
  out.signal.resize(plan.n_samples);
  for (std::size_t n = 0; n < plan.n_samples; ++n) {
    const double t = static_cast<double>(n) / plan.sample_rate_hz;
    const auto exits = interferometer::propagate(config, tilts_at(dithers, t));
    out.t[n] = t;
    out.signal[n] = detector_reading(exits.detector, plan.detector);
  }

  if (plan.noise_rms > 0.0) {
    std::mt19937_64 rng(plan.noise_seed);
    std::normal_distribution<double> noise(0.0, plan.noise_rms);
    for (double& s : out.signal) s += noise(rng);
  }
  return out;
}

PowerSpectrum power_spectrum(std::span<const double> series, const SimPlan& plan) {
  const auto bins = windowed_dft(series, plan);
  const double n = static_cast<double>(plan.n_samples);
  PowerSpectrum out;
  out.freqs_hz.resize(bins.size());
  out.power.resize(bins.size());
  for (std::size_t k = 0; k < bins.size(); ++k) {
    const bool edge = k == 0 || k + 1 == bins.size();
    out.freqs_hz[k] = static_cast<double>(k) * plan.bin_width_hz();
    out.power[k] = (edge ? 1.0 : 2.0) * std::norm(bins[k]) / (n * n);
  }
  return out;
}

std::complex<double> tone_coefficient(std::span<const double> series, const SimPlan& plan, double freq_hz) {
  const auto bins = windowed_dft(series, plan);
  const auto k = static_cast<std::size_t>(std::llround(freq_hz / plan.bin_width_hz()));
  if (k >= bins.size()) throw PlanError("frequency above Nyquist");
  return bins[k] / static_cast<double>(plan.n_samples);
}

std::size_t bin_index(const PowerSpectrum& spectrum, double freq_hz) {
  if (spectrum.freqs_hz.size() < 2) throw PlanError("spectrum has fewer than two bins");
  const double df = spectrum.freqs_hz[1] - spectrum.freqs_hz[0];
  const long long k = std::llround(freq_hz / df);
  if (k < 0 || static_cast<std::size_t>(k) >= spectrum.freqs_hz.size()) {
    throw ConfigError("frequency " + std::to_string(freq_hz) + " Hz lies outside the spectrum");
  }
  return static_cast<std::size_t>(k);
}

SignalVerdict classify_signals(const PowerSpectrum& spectrum, std::span<const MirrorDither> dithers,
                               double threshold_db) {
  if (!(threshold_db < 0.0)) throw DomainError("signal threshold must be negative dB");
  if (spectrum.freqs_hz.size() != spectrum.power.size()) throw PlanError("malformed spectrum");

  std::vector<std::size_t> bins;
  for (const auto& d : dithers) {
    const std::size_t k = bin_index(spectrum, d.frequency_hz);
    if (k < 1 || k + 1 >= spectrum.power.size()) {
      throw ConfigError("mirror " + std::string(interferometer::to_string(d.mirror)) +
                        " frequency too close to DC or Nyquist to resolve");
    }
    for (std::size_t j = 0; j < bins.size(); ++j) {
      const std::size_t gap = k > bins[j] ? k - bins[j] : bins[j] - k;
      if (gap < 3) {
        throw ConfigError("mirrors " + std::string(interferometer::to_string(dithers[j].mirror)) + " and " +
                          std::string(interferometer::to_string(d.mirror)) + " are not spectrally resolvable");
      }
    }
    bins.push_back(k);
  }

  std::vector<double> peaks;
  double strongest = 0.0;
  for (std::size_t k : bins) {
    const double p = std::max({spectrum.power[k - 1], spectrum.power[k], spectrum.power[k + 1]});
    peaks.push_back(p);
    strongest = std::max(strongest, p);
  }

  SignalVerdict verdict;
  verdict.threshold_db = threshold_db;
  const double cutoff = strongest * std::pow(10.0, threshold_db / 10.0);
  for (std::size_t i = 0; i < dithers.size(); ++i) {
    MirrorVerdict mv;
    mv.peak_power = peaks[i];
    mv.peak_db = (strongest > 0.0 && peaks[i] > 0.0) ? std::max(kFloorDb, 10.0 * std::log10(peaks[i] / strongest))
                                                     : kFloorDb;
    mv.presence = (strongest > 0.0 && peaks[i] > cutoff) ? Presence::Present : Presence::Absent;
    verdict.mirrors[dithers[i].mirror] = mv;
  }
  return verdict;
}

}  // namespace nmzi::weakmeas
