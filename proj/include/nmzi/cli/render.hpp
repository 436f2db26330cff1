#pragma once

#include <cstddef>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "nmzi/weakmeas.hpp"

namespace nmzi::cli {

struct SpectrumMarker {
  std::string label;
  double freq_hz = 0.0;
};

/// One chart row: the loudest bin in [f_lo, f_hi), in dB relative to the loudest displayed bin.
struct SpectrumRow {
  double f_lo = 0.0;
  double f_hi = 0.0;
  double db = 0.0;  ///< floored at kRenderFloorDb
  std::vector<std::string> markers;
};

inline constexpr double kRenderFloorDb = -120.0;
inline constexpr std::size_t kMinRenderWidth = 40;

/// Rows spanning the marker band (padded), or the full spectrum when there are no markers.
std::vector<SpectrumRow> spectrum_rows(const weakmeas::PowerSpectrum& spectrum, std::span<const SpectrumMarker> markers,
                                       std::size_t rows = 40);

/// Log-scale horizontal bar chart of spectrum_rows. ':' marks the threshold
/// column; rows containing a marker frequency are annotated "<label".
/// Throws DomainError for width < 40.
std::string render_spectrum(const weakmeas::PowerSpectrum& spectrum, std::span<const SpectrumMarker> markers,
                            std::size_t width = 72, double threshold_db = weakmeas::kDefaultThresholdDb,
                            std::size_t rows = 40);

/// Reads the `freq_hz,power` CSV written by the run command.
weakmeas::PowerSpectrum read_spectrum_csv(std::istream& in);

}  // namespace nmzi::cli
