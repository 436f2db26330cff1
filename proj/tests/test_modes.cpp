#include <doctest.h>

#include <cmath>
#include <random>

#include "nmzi/errors.hpp"
#include "nmzi/modes.hpp"
#include "oracles.hpp"

using namespace nmzi::modes;

namespace {

TransverseState d_port_branches(double kA, double kB, double kC, double kE, double kF) {
  return TransverseState(1.0, {{1.0 / 3, kC}, {1.0 / 3, kE + kA + kF}, {-1.0 / 3, kE + kB + kF}});
}

TransverseState random_state(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> c(-1.0, 1.0), s(-0.5, 0.5);
  std::vector<GaussianBranch> br;
  for (std::size_t i = 0; i < n; ++i) br.push_back({{c(rng), c(rng)}, s(rng)});
  return TransverseState(1.0, std::move(br));
}

}  // namespace

TEST_CASE("gaussian_eval peaks at zero and is even") {
  const double peak = gaussian_eval(0.0, 1.0).real();
  for (double k : {0.1, 0.7, 2.5}) {
    CHECK(gaussian_eval(k, 1.0).real() < peak);
    CHECK(gaussian_eval(k, 1.0) == gaussian_eval(-k, 1.0));
    CHECK(gaussian_eval(k, 1.0).imag() == 0.0);
  }
}

TEST_CASE("normalisation constant matches a quadrature oracle") {
  // N fixed by requiring int_{-8}^{8} N^2 exp(-2k^2) dk = 1 on a fine Simpson grid.
  const double mass = oracle::simpson([](double k) { return std::exp(-2 * k * k); }, -8, 8, 20000);
  const double n_oracle = 1.0 / std::sqrt(mass);
  CHECK(gaussian_eval(0.0, 1.0).real() == doctest::Approx(n_oracle).epsilon(1e-10));
  const double p = oracle::simpson([](double k) { return std::norm(gaussian_eval(k, 1.0)); }, -8, 8, 20000);
  CHECK(std::abs(p - 1.0) <= 1e-10);
}

TEST_CASE("non-positive sigma is a domain error") {
  CHECK_THROWS_AS(gaussian_eval(0.0, 0.0), nmzi::DomainError);
  CHECK_THROWS_AS(gaussian_eval(0.0, -1.0), nmzi::DomainError);
  CHECK_THROWS_AS(TransverseState(0.0), nmzi::DomainError);
  CHECK_THROWS_AS(TransverseState(1.0, {{{NAN, 0.0}, 0.0}}), nmzi::DomainError);
}

TEST_CASE("state_eval examples") {
  const double kappa = 0.37;
  const TransverseState cancel(1.0, {{1.0 / 3, 0.0}, {1.0 / 3, kappa}, {-1.0 / 3, kappa}});
  const TransverseState single(1.0, {{1.0, 0.0}});
  for (double k : {-1.3, 0.0, 0.2, 2.0}) {
    CHECK(std::abs(state_eval(cancel, k) - gaussian_eval(k, 1.0) / 3.0) <= 1e-15);
    CHECK(state_eval(single, k) == gaussian_eval(k, 1.0));
    CHECK(std::abs(state_eval(d_port_branches(0, 0, 0, 0, 0), k) - gaussian_eval(k, 1.0) / 3.0) <= 1e-15);
  }
}

TEST_CASE("total_probability examples") {
  const TransverseState unit(1.0, {{1.0, 0.0}});
  const TransverseState third(1.0, {{1.0 / 3, 0.0}});
  CHECK(std::abs(total_probability(unit, default_grid(unit)) - 1.0) <= 1e-8);
  CHECK(std::abs(total_probability(third, default_grid(third)) - 1.0 / 9) <= 1e-8);

  // kA = 0.5 sigma: the C and B routes share shift 0 and cancel, leaving (1/3) Psi(k - 0.5).
  const auto s = d_port_branches(0.5, 0, 0, 0, 0);
  const double expected = oracle::d_port(0.5, 0, 0, 0, 0).probability();
  CHECK(expected == doctest::Approx(1.0 / 9).epsilon(1e-14));
  CHECK(std::abs(total_probability(s, default_grid(s)) - expected) <= 1e-8);

  // A genuinely overlapping case lands strictly inside (1/9, 1/3).
  const auto s2 = d_port_branches(0.5, 0, 0.2, 0, 0);
  const double p2 = total_probability(s2, default_grid(s2));
  CHECK(std::abs(p2 - oracle::d_port(0.5, 0, 0.2, 0, 0).probability()) <= 1e-8);
  CHECK(p2 > 1.0 / 9);
  CHECK(p2 < 1.0 / 3);
}

TEST_CASE("narrow grid is a tail-truncation error") {
  const TransverseState s(1.0, {{1.0, 0.0}});
  CHECK_THROWS_AS(total_probability(s, Grid(-2.0, 2.0, 512)), nmzi::TailTruncationError);
  CHECK_THROWS_AS(centroid(s, Grid(-8.0, 2.0, 512)), nmzi::TailTruncationError);
  CHECK_THROWS_AS(Grid(1.0, 1.0, 10), nmzi::DomainError);
  CHECK_THROWS_AS(Grid(0.0, 1.0, 1), nmzi::DomainError);
}

TEST_CASE("centroid examples") {
  const TransverseState shifted(1.0, {{1.0, 0.23}});
  CHECK(std::abs(centroid(shifted, default_grid(shifted)) - 0.23) <= 1e-8);

  const auto ef = d_port_branches(0, 0, 0, 0.1, 0.1);
  CHECK(std::abs(centroid(ef, default_grid(ef))) <= 1e-10);

  const auto ab = d_port_branches(0.01, -0.01, 0, 0, 0);
  const double c = centroid(ab, default_grid(ab));
  CHECK(std::abs(c - oracle::d_port(0.01, -0.01, 0, 0, 0).centroid()) <= 1e-12);
  CHECK(std::abs(c - 0.02) <= 0.01 * 0.01);
}

TEST_CASE("null state has no centroid") {
  const TransverseState null(1.0, {{0.5, 0.1}, {-0.5, 0.1}});
  CHECK_THROWS_AS(centroid(null, default_grid(null)), nmzi::UndefinedCentroidError);
  CHECK_THROWS_AS(centroid(null), nmzi::UndefinedCentroidError);
  CHECK_THROWS_AS(quadcell(null), nmzi::UndefinedCentroidError);
}

TEST_CASE("quadcell examples") {
  const TransverseState centred(1.0, {{1.0, 0.0}});
  CHECK(std::abs(quadcell(centred, default_grid(centred))) <= 1e-10);

  const TransverseState up(1.0, {{1.0, 0.05}});
  const TransverseState down(1.0, {{1.0, -0.05}});
  const double qu = quadcell(up, default_grid(up));
  const double qd = quadcell(down, default_grid(down));
  CHECK(qu > 0.0);
  CHECK(std::abs(qu + qd) <= 1e-12);

  // |Psi(k - d)|^2 is a normal density with std sigma/2: P(k>0) - P(k<0) = erf(sqrt2 d / sigma).
  CHECK(std::abs(qu - std::erf(std::sqrt(2.0) * 0.05)) <= 1e-8);
}

TEST_CASE("closed-form evaluators agree with Simpson quadrature") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_state(rng, 4);
    const auto f = [&](double k) { return std::norm(state_eval(s, k)); };
    const double p = oracle::simpson(f, -10, 10, 8000);
    const double m = oracle::simpson([&](double k) { return k * f(k); }, -10, 10, 8000);
    const double q = oracle::simpson(f, 0, 10, 4000) - oracle::simpson(f, -10, 0, 4000);
    CHECK(std::abs(total_probability(s) - p) <= 1e-10);
    CHECK(std::abs(centroid(s) - m / p) <= 1e-10 * (1 + std::abs(m / p)));
    CHECK(std::abs(quadcell(s) - q) <= 1e-10);
    CHECK(std::abs(quadcell(s, default_grid(s)) - q) <= 1e-9);
  }
}

TEST_CASE("position-space amplitude is unit-norm and modulated by the momentum shift") {
  const TransverseState s(1.0, {{1.0, 0.3}});
  const double p = oracle::simpson([&](double y) { return std::norm(position_eval(s, y)); }, -12, 12, 8000);
  CHECK(std::abs(p - 1.0) <= 1e-10);
  CHECK(std::arg(position_eval(s, 1.0)) == doctest::Approx(0.3));
}

TEST_CASE("property: linearity of state_eval under concatenation") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_state(rng, 3);
    const auto b = random_state(rng, 2);
    for (double k : {-1.0, 0.0, 0.4}) {
      CHECK(std::abs(state_eval(a + b, k) - (state_eval(a, k) + state_eval(b, k))) <= 1e-12);
    }
  }
}

TEST_CASE("property: scaling coefficients scales probability by |c|^2") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_state(rng, 3);
    const Complex c{0.7, -1.3};
    const double p = total_probability(s, default_grid(s));
    const double ps = total_probability(s.scaled(c), default_grid(s));
    CHECK(std::abs(ps / (std::norm(c) * p) - 1.0) <= 1e-10);
  }
}

TEST_CASE("property: equal-shift branches merge") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double shift = 0.3 * u(rng);
    const Complex c1{u(rng), u(rng)}, c2{u(rng), u(rng)};
    const TransverseState split(1.0, {{c1, shift}, {c2, shift}, {0.4, -0.1}});
    const auto joined = split.merged();
    REQUIRE(joined.branches().size() == 2);
    const auto g = default_grid(split);
    CHECK(std::abs(total_probability(split, g) - total_probability(joined, g)) <= 1e-12);
    CHECK(std::abs(centroid(split, g) - centroid(joined, g)) <= 1e-12);
    CHECK(std::abs(quadcell(split, g) - quadcell(joined, g)) <= 1e-12);
  }
}

TEST_CASE("property: translation covariance") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_state(rng, 3);
    const double delta = 0.75;
    const auto t = s.translated(delta);
    CHECK(std::abs(centroid(t, default_grid(t)) - centroid(s, default_grid(s)) - delta) <= 1e-10);
    CHECK(std::abs(total_probability(t, default_grid(t)) - total_probability(s, default_grid(s))) <= 1e-10);
  }
}

TEST_CASE("property: grid refinement converged at default resolution") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = random_state(rng, 3);
    const auto g = default_grid(s);
    const auto fine = default_grid(s, 2 * kDefaultGridPoints);
    CHECK(std::abs(total_probability(s, g) - total_probability(s, fine)) < 1e-8);
    CHECK(std::abs(centroid(s, g) - centroid(s, fine)) < 1e-8);
  }
}
