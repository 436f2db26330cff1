#pragma once

// Dithered-mirror detector simulation and spectral signal extraction.
//
// Each mirror vibrates as kappa_i(t) = a_i sin(2 pi f_i t + phi_i). The D-port
// state is propagated at every sample time and reduced to a scalar by the
// detector model; the resulting record is Hann-windowed and transformed, and
// a mirror "carries signal" when its spectral line stands above a threshold
// relative to the strongest mirror line.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nmzi/interferometer.hpp"

namespace nmzi::weakmeas {

using interferometer::Mirror;

struct MirrorDither {
  Mirror mirror = Mirror::A;
  double amplitude = 0.0;     ///< transverse-momentum units (same as sigma)
  double frequency_hz = 1.0;
  double phase_rad = 0.0;

  friend bool operator==(const MirrorDither&, const MirrorDither&) = default;
};

/// Default dither frequencies: mutually non-harmonic and bin-centred at the default plan.
double default_frequency(Mirror m);

/// One dither per mirror at the default frequencies, zero phase.
std::vector<MirrorDither> default_dithers(double amplitude);

/// Throws ConfigError on a negative amplitude, non-positive frequency, or a
/// repeated mirror or frequency.
void validate_dithers(std::span<const MirrorDither> dithers);

/// Non-fatal diagnostics, e.g. amplitudes above 0.1 sigma where the weak regime breaks down.
std::vector<std::string> dither_warnings(std::span<const MirrorDither> dithers, double sigma);

enum class DetectorModel { Centroid, Quadcell };

std::string_view to_string(DetectorModel m);
std::optional<DetectorModel> parse_detector(std::string_view s);

struct SimPlan {
  double sample_rate_hz = 8192.0;
  std::size_t n_samples = 16384;
  DetectorModel detector = DetectorModel::Centroid;
  /// Additive Gaussian noise (rms, signal units). Zero disables the hook.
  double noise_rms = 0.0;
  std::uint64_t noise_seed = 0;

  double bin_width_hz() const { return sample_rate_hz / static_cast<double>(n_samples); }
  /// Throws PlanError: non power-of-two length, bad rate, or a dither at or above Nyquist.
  void validate(std::span<const MirrorDither> dithers) const;

  friend bool operator==(const SimPlan&, const SimPlan&) = default;
};

struct TimeSeries {
  std::vector<double> t;
  std::vector<double> signal;
};

struct PowerSpectrum {
  std::vector<double> freqs_hz;
  std::vector<double> power;
  std::string window = "hann";
};

enum class Presence { Present, Absent };

struct MirrorVerdict {
  Presence presence = Presence::Absent;
  double peak_power = 0.0;
  double peak_db = 0.0;  ///< relative to the strongest mirror line, floored at kFloorDb
};

struct SignalVerdict {
  double threshold_db = -40.0;
  std::map<Mirror, MirrorVerdict> mirrors;

  bool present(Mirror m) const;
};

inline constexpr double kDefaultThresholdDb = -40.0;
inline constexpr double kFloorDb = -400.0;

interferometer::TiltAssignment tilts_at(std::span<const MirrorDither> dithers, double t);

/// Detector reading for one D-port state under the given model (closed form).
double detector_reading(const modes::TransverseState& state, DetectorModel model);

/// Deterministic sampled detector record; sample n is taken at t = n / sample_rate.
TimeSeries simulate(const interferometer::NetworkConfig& config, std::span<const MirrorDither> dithers,
                    const SimPlan& plan);

/// One-sided Hann-windowed power of the mean-removed series, normalised so
/// that the bins sum to the windowed mean square (1/N) sum (w_n x_n)^2.
PowerSpectrum power_spectrum(std::span<const double> series, const SimPlan& plan);

/// Windowed DFT coefficient of the mean-removed series at the bin nearest freq_hz.
std::complex<double> tone_coefficient(std::span<const double> series, const SimPlan& plan, double freq_hz);

/// Index of the bin nearest freq_hz.
std::size_t bin_index(const PowerSpectrum& spectrum, double freq_hz);

/// Marks a mirror present when its peak within +-1 bin of its frequency exceeds
/// (strongest mirror peak + threshold_db). Throws ConfigError when two dither
/// frequencies are closer than 3 bins or fall outside the spectrum, and
/// DomainError for a non-negative threshold.
SignalVerdict classify_signals(const PowerSpectrum& spectrum, std::span<const MirrorDither> dithers,
                               double threshold_db = kDefaultThresholdDb);

}  // namespace nmzi::weakmeas
