#include "nmzi/cli/render.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>

#include "nmzi/errors.hpp"

namespace nmzi::cli {
namespace {

constexpr std::size_t kLabelCols = 13;  // "  307.0 Hz |" plus a space
constexpr std::size_t kNoteCols = 8;

double parse_field(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError(fmt::format("spectrum csv line {}: bad number '{}'", line, s));
  }
  return v;
}

}  // namespace

std::vector<SpectrumRow> spectrum_rows(const weakmeas::PowerSpectrum& spectrum, std::span<const SpectrumMarker> markers,
                                       std::size_t rows) {
  if (spectrum.freqs_hz.size() < 2 || spectrum.power.size() != spectrum.freqs_hz.size() || rows == 0) return {};
  const double df = spectrum.freqs_hz[1] - spectrum.freqs_hz[0];
  const double f_max = spectrum.freqs_hz.back();

  double lo = 0.0;
  double hi = f_max + df;
  if (!markers.empty()) {
    const auto [mn, mx] = std::minmax_element(markers.begin(), markers.end(),
                                              [](const auto& a, const auto& b) { return a.freq_hz < b.freq_hz; });
    const double pad = 0.15 * (mx->freq_hz - mn->freq_hz) + 5.0 * df;
    lo = std::max(0.0, mn->freq_hz - pad);
    hi = std::min(f_max + df, mx->freq_hz + pad);
  }
  const double step = (hi - lo) / static_cast<double>(rows);

  std::vector<SpectrumRow> out(rows);
  std::vector<double> peak(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    out[r].f_lo = lo + static_cast<double>(r) * step;
    out[r].f_hi = out[r].f_lo + step;
  }
  auto row_of = [&](double f) -> std::ptrdiff_t {
    if (f < lo || f >= hi) return -1;
    return std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>((f - lo) / step), static_cast<std::ptrdiff_t>(rows) - 1);
  };
  for (std::size_t k = 0; k < spectrum.power.size(); ++k) {
    if (auto r = row_of(spectrum.freqs_hz[k]); r >= 0) peak[r] = std::max(peak[r], spectrum.power[k]);
  }
  for (const auto& m : markers) {
    if (auto r = row_of(m.freq_hz); r >= 0) out[r].markers.push_back(m.label);
  }

  const double ref = *std::max_element(peak.begin(), peak.end());
  for (std::size_t r = 0; r < rows; ++r) {
    out[r].db = (ref > 0.0 && peak[r] > 0.0) ? std::max(kRenderFloorDb, 10.0 * std::log10(peak[r] / ref))
                                             : kRenderFloorDb;
  }
  return out;
}

std::string render_spectrum(const weakmeas::PowerSpectrum& spectrum, std::span<const SpectrumMarker> markers,
                            std::size_t width, double threshold_db, std::size_t rows) {
  if (width < kMinRenderWidth) throw DomainError(fmt::format("chart width must be at least {}", kMinRenderWidth));
  const std::size_t bar_cols = width - kLabelCols - kNoteCols;
  const auto column = [&](double db) {
    const double frac = std::clamp((db - kRenderFloorDb) / -kRenderFloorDb, 0.0, 1.0);
    return static_cast<std::size_t>(std::lround(frac * static_cast<double>(bar_cols)));
  };
  const std::size_t threshold_col = std::min(column(threshold_db), bar_cols - 1);

  std::string out = fmt::format("power, dB relative to peak (floor {} dB, ':' = {} dB)\n", kRenderFloorDb, threshold_db);
  for (const auto& row : spectrum_rows(spectrum, markers, rows)) {
    std::string bar(bar_cols, ' ');
    const std::size_t len = row.db > kRenderFloorDb ? column(row.db) : 0;
    for (std::size_t i = 0; i < len; ++i) bar[i] = '#';
    if (bar[threshold_col] == ' ') bar[threshold_col] = ':';

    std::string note;
    for (const auto& m : row.markers) note += "<" + m;
    out += fmt::format("{:8.1f} Hz |{}| {}", row.f_lo, bar, note);
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
  }
  return out;
}

weakmeas::PowerSpectrum read_spectrum_csv(std::istream& in) {
  weakmeas::PowerSpectrum out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "freq_hz,power") throw ConfigError("spectrum csv must start with header 'freq_hz,power'");
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError(fmt::format("spectrum csv line {}: expected two columns", line_no));
    out.freqs_hz.push_back(parse_field(std::string_view(line).substr(0, comma), line_no));
    out.power.push_back(parse_field(std::string_view(line).substr(comma + 1), line_no));
  }
  if (out.freqs_hz.size() < 2) throw ConfigError("spectrum csv needs at least two rows");
  return out;
}

}  // namespace nmzi::cli
