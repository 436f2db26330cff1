#pragma once

// Test-only reference computations, independent of the library's evaluation paths.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

using Complex = std::complex<double>;

/// Composite Simpson with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// Branches as (coefficient, shift) pairs of exp(-(k-s)^2/sigma^2) scaled to unit norm.
struct Branches {
  double sigma = 1.0;
  std::vector<std::pair<Complex, double>> terms;

  double norm_const() const { return std::pow(2.0 / std::numbers::pi, 0.25) / std::sqrt(sigma); }

  Complex eval(double k) const {
    Complex s{};
    for (auto [c, sh] : terms) s += c * norm_const() * std::exp(-(k - sh) * (k - sh) / (sigma * sigma));
    return s;
  }

  // Pairwise analytic Gaussian overlap integrals.
  double probability() const {
    double p = 0.0;
    for (auto [ci, si] : terms)
      for (auto [cj, sj] : terms)
        p += (std::conj(ci) * cj).real() * std::exp(-(si - sj) * (si - sj) / (2 * sigma * sigma));
    return p;
  }
  double first_moment() const {
    double p = 0.0;
    for (auto [ci, si] : terms)
      for (auto [cj, sj] : terms)
        p += (std::conj(ci) * cj).real() * std::exp(-(si - sj) * (si - sj) / (2 * sigma * sigma)) * 0.5 * (si + sj);
    return p;
  }
  double centroid() const { return first_moment() / probability(); }
};

/// Eq.-(3)-shaped D-port branches from per-mirror tilts.
inline Branches d_port(double kA, double kB, double kC, double kE, double kF, double sigma = 1.0) {
  return {sigma, {{1.0 / 3, kC}, {1.0 / 3, kE + kA + kF}, {-1.0 / 3, kE + kB + kF}}};
}

}  // namespace oracle
