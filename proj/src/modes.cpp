#include "nmzi/modes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "nmzi/errors.hpp"

namespace nmzi::modes {
namespace {

constexpr double kTailMassLimit = 1e-10;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Scale for deciding that cancellation left nothing but rounding noise.
double null_threshold(const TransverseState& state) {
  double l1 = 0.0;
  for (const auto& b : state.branches()) l1 += std::abs(b.coeff);
  return 64.0 * std::numeric_limits<double>::epsilon() * l1 * l1;
}

double density(const TransverseState& state, double k) { return std::norm(state_eval(state, k)); }

void check_tails(const TransverseState& state, const Grid& grid) {
  const double edge = std::max(density(state, grid.k_min()), density(state, grid.k_max()));
  if (edge * state.sigma() > kTailMassLimit) {
    throw TailTruncationError("grid [" + std::to_string(grid.k_min()) + ", " +
                              std::to_string(grid.k_max()) +
                              "] truncates the state: edge density " + std::to_string(edge));
  }
}

template <typename F>
double trapezoid(const Grid& grid, F&& f) {
  const std::size_t n = grid.size();
  double sum = 0.5 * (f(grid[0]) + f(grid[n - 1]));
  for (std::size_t i = 1; i + 1 < n; ++i) sum += f(grid[i]);
  return sum * grid.spacing();
}

// Composite Simpson on [a, b] with a step no coarser than max_step.
template <typename F>
double simpson(double a, double b, double max_step, F&& f) {
  if (!(b > a)) return 0.0;
  auto intervals = static_cast<std::size_t>(std::ceil((b - a) / max_step));
  intervals = std::max<std::size_t>(2, intervals + (intervals % 2));
  const double h = (b - a) / static_cast<double>(intervals);
  double sum = f(a) + f(b);
  for (std::size_t i = 1; i < intervals; ++i) {
    sum += (i % 2 == 1 ? 4.0 : 2.0) * f(a + static_cast<double>(i) * h);
  }
  return sum * h / 3.0;
}

struct PairTerm {
  double weight;    // Re(conj(c_i) c_j) * overlap
  double midpoint;  // (s_i + s_j) / 2
};

template <typename F>
void for_each_pair(const TransverseState& state, F&& f) {
  const auto br = state.branches();
  const double two_sigma2 = 2.0 * state.sigma() * state.sigma();
  for (std::size_t i = 0; i < br.size(); ++i) {
    for (std::size_t j = 0; j < br.size(); ++j) {
      const double d = br[i].shift - br[j].shift;
      const double overlap = std::exp(-d * d / two_sigma2);
      const double w = (std::conj(br[i].coeff) * br[j].coeff).real() * overlap;
      f(PairTerm{w, 0.5 * (br[i].shift + br[j].shift)});
    }
  }
}

}  // namespace

TransverseState::TransverseState(double sigma, std::vector<GaussianBranch> branches)
    : sigma_(sigma), branches_(std::move(branches)) {
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) {
    throw DomainError("transverse width sigma must be positive and finite");
  }
  for (const auto& b : branches_) {
    if (!finite(b.coeff) || !std::isfinite(b.shift)) {
      throw DomainError("Gaussian branch has a non-finite coefficient or shift");
    }
  }
}

TransverseState TransverseState::scaled(Complex factor) const {
  auto out = branches_;
  for (auto& b : out) b.coeff *= factor;
  return TransverseState(sigma_, std::move(out));
}

TransverseState TransverseState::translated(double delta) const {
  auto out = branches_;
  for (auto& b : out) b.shift += delta;
  return TransverseState(sigma_, std::move(out));
}

TransverseState TransverseState::merged() const {
  std::vector<GaussianBranch> out;
  for (const auto& b : branches_) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& o) { return o.shift == b.shift; });
    if (it == out.end()) {
      out.push_back(b);
    } else {
      it->coeff += b.coeff;
    }
  }
  std::erase_if(out, [](const auto& b) { return b.coeff == Complex{}; });
  return TransverseState(sigma_, std::move(out));
}

double TransverseState::min_shift() const noexcept {
  double m = branches_.empty() ? 0.0 : branches_.front().shift;
  for (const auto& b : branches_) m = std::min(m, b.shift);
  return m;
}

double TransverseState::max_shift() const noexcept {
  double m = branches_.empty() ? 0.0 : branches_.front().shift;
  for (const auto& b : branches_) m = std::max(m, b.shift);
  return m;
}

TransverseState operator+(const TransverseState& lhs, const TransverseState& rhs) {
  if (lhs.sigma_ != rhs.sigma_) throw DomainError("cannot superpose states of different width");
  auto out = lhs.branches_;
  out.insert(out.end(), rhs.branches_.begin(), rhs.branches_.end());
  return TransverseState(lhs.sigma_, std::move(out));
}

Grid::Grid(double k_min, double k_max, std::size_t n_points)
    : k_min_(k_min), k_max_(k_max), n_points_(n_points) {
  if (!std::isfinite(k_min) || !std::isfinite(k_max) || !(k_min < k_max)) {
    throw DomainError("grid requires finite k_min < k_max");
  }
  if (n_points < 2) throw DomainError("grid requires at least two points");
}

double gaussian_norm(double sigma) {
  if (!(sigma > 0.0)) throw DomainError("transverse width sigma must be positive");
  return std::pow(2.0 / std::numbers::pi, 0.25) / std::sqrt(sigma);
}

Complex gaussian_eval(double k, double sigma) {
  const double n = gaussian_norm(sigma);
  const double x = k / sigma;
  return {n * std::exp(-x * x), 0.0};
}

Complex state_eval(const TransverseState& state, double k) {
  Complex sum{};
  for (const auto& b : state.branches()) sum += b.coeff * gaussian_eval(k - b.shift, state.sigma());
  return sum;
}

Grid default_grid(const TransverseState& state, std::size_t n_points) {
  const double pad = kGridHalfWidthSigmas * state.sigma();
  return Grid(state.min_shift() - pad, state.max_shift() + pad, n_points);
}

double total_probability(const TransverseState& state, const Grid& grid) {
  check_tails(state, grid);
  return trapezoid(grid, [&](double k) { return density(state, k); });
}

double centroid(const TransverseState& state, const Grid& grid) {
  const double mass = total_probability(state, grid);
  if (!(mass > null_threshold(state))) throw UndefinedCentroidError("centroid of a null transverse state");
  return trapezoid(grid, [&](double k) { return k * density(state, k); }) / mass;
}

double quadcell(const TransverseState& state, const Grid& grid) {
  const double mass = total_probability(state, grid);
  if (!(mass > null_threshold(state))) throw UndefinedCentroidError("quad-cell signal of a null transverse state");
  const auto f = [&](double k) { return density(state, k); };
  const double h = grid.spacing();
  const double upper = simpson(std::max(0.0, grid.k_min()), grid.k_max(), h, f);
  const double lower = simpson(grid.k_min(), std::min(0.0, grid.k_max()), h, f);
  return upper - lower;
}

double total_probability(const TransverseState& state) {
  double sum = 0.0;
  for_each_pair(state, [&](PairTerm t) { sum += t.weight; });
  return sum;
}

double centroid(const TransverseState& state) {
  double mass = 0.0;
  double moment = 0.0;
  for_each_pair(state, [&](PairTerm t) {
    mass += t.weight;
    moment += t.weight * t.midpoint;
  });
  if (!(mass > null_threshold(state))) throw UndefinedCentroidError("centroid of a null transverse state");
  return moment / mass;
}

double quadcell(const TransverseState& state) {
  double mass = 0.0;
  double signal = 0.0;
  const double scale = std::numbers::sqrt2 / state.sigma();
  for_each_pair(state, [&](PairTerm t) {
    mass += t.weight;
    signal += t.weight * std::erf(scale * t.midpoint);
  });
  if (!(mass > null_threshold(state))) throw UndefinedCentroidError("quad-cell signal of a null transverse state");
  return signal;
}

Complex position_eval(const TransverseState& state, double y) {
  const double s = state.sigma();
  const double envelope = gaussian_norm(s) * s / std::numbers::sqrt2 * std::exp(-s * s * y * y / 4.0);
  Complex sum{};
  for (const auto& b : state.branches()) sum += b.coeff * std::polar(1.0, b.shift * y);
  return sum * envelope;
}

}  // namespace nmzi::modes
