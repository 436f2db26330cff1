#pragma once

// Transverse-mode algebra for the nested interferometer.
//
// A transverse state is kept in closed form as a list of complex-weighted,
// momentum-shifted copies of the base Gaussian
//
//   Psi(k) = N exp(-k^2 / sigma^2),   N = (2/pi)^{1/4} sigma^{-1/2}
//
// so that propagation through mirrors and splitters is exact. Sampling only
// happens when a detector functional is evaluated, either on a uniform Grid
// (quadrature) or through the closed-form Gaussian overlap integrals.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace nmzi::modes {

using Complex = std::complex<double>;

struct GaussianBranch {
  Complex coeff{0.0, 0.0};
  double shift = 0.0;  ///< transverse-momentum offset, same units as sigma

  friend bool operator==(const GaussianBranch&, const GaussianBranch&) = default;
};

/// Superposition  sum_j coeff_j * Psi(k - shift_j)  with a shared width sigma.
class TransverseState {
 public:
  /// Throws DomainError unless sigma > 0 and every branch is finite.
  explicit TransverseState(double sigma, std::vector<GaussianBranch> branches = {});

  double sigma() const noexcept { return sigma_; }
  std::span<const GaussianBranch> branches() const noexcept { return branches_; }
  bool empty() const noexcept { return branches_.empty(); }

  TransverseState scaled(Complex factor) const;
  TransverseState translated(double delta) const;
  /// Combines branches with identical shift and drops exact zeros. Order follows first occurrence.
  TransverseState merged() const;

  double min_shift() const noexcept;
  double max_shift() const noexcept;

  /// Branch-list concatenation; both states must share sigma.
  friend TransverseState operator+(const TransverseState& lhs, const TransverseState& rhs);
  friend bool operator==(const TransverseState&, const TransverseState&) = default;

 private:
  double sigma_;
  std::vector<GaussianBranch> branches_;
};

/// Uniform sampling of [k_min, k_max] with n_points nodes (endpoints included).
class Grid {
 public:
  Grid(double k_min, double k_max, std::size_t n_points);

  double k_min() const noexcept { return k_min_; }
  double k_max() const noexcept { return k_max_; }
  std::size_t size() const noexcept { return n_points_; }
  double spacing() const noexcept { return (k_max_ - k_min_) / static_cast<double>(n_points_ - 1); }
  double operator[](std::size_t i) const noexcept { return k_min_ + static_cast<double>(i) * spacing(); }

 private:
  double k_min_;
  double k_max_;
  std::size_t n_points_;
};

inline constexpr std::size_t kDefaultGridPoints = 4096;
inline constexpr double kGridHalfWidthSigmas = 8.0;

/// Unit-L2-norm constant of the base Gaussian.
double gaussian_norm(double sigma);

/// N exp(-k^2/sigma^2); always real. Throws DomainError for sigma <= 0.
Complex gaussian_eval(double k, double sigma);

Complex state_eval(const TransverseState& state, double k);

/// [min_shift - 8 sigma, max_shift + 8 sigma] with n_points nodes.
Grid default_grid(const TransverseState& state, std::size_t n_points = kDefaultGridPoints);

// Quadrature evaluators. All throw TailTruncationError when the state density
// at either grid edge implies more than 1e-10 of probability outside the grid.

/// Trapezoidal  int |psi|^2 dk.
double total_probability(const TransverseState& state, const Grid& grid);
/// <k> = int k |psi|^2 / int |psi|^2. Throws UndefinedCentroidError on a null state.
double centroid(const TransverseState& state, const Grid& grid);
/// P(k > 0) - P(k < 0), unnormalised. Composite Simpson on each half-line.
double quadcell(const TransverseState& state, const Grid& grid);

// Closed-form evaluators from the pairwise overlaps
//   int Psi(k-a) Psi(k-b) dk = exp(-(a-b)^2 / (2 sigma^2)).

double total_probability(const TransverseState& state);
double centroid(const TransverseState& state);
double quadcell(const TransverseState& state);

/// Position-space amplitude  (2 pi)^{-1/2} int psi(k) e^{iky} dk.
Complex position_eval(const TransverseState& state, double y);

}  // namespace nmzi::modes
