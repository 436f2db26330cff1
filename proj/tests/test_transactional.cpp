#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nmzi/errors.hpp"
#include "nmzi/transactional.hpp"
#include "oracles.hpp"

using namespace nmzi::transactional;

namespace {

const std::vector<PathLabel> kABC{"A", "B", "C"};

Ket random_ket(std::mt19937_64& rng, std::span<const PathLabel> basis) {
  std::normal_distribution<double> g;
  std::map<PathLabel, Complex> amps;
  for (const auto& l : basis) amps[l] = {g(rng), g(rng)};
  return Ket(std::move(amps));
}

// Dense reference: weak value of |L><L| computed from raw amplitudes.
Complex dense_weak_value(const Ket& pre, const Bra& post, const PathLabel& which, std::span<const PathLabel> basis) {
  Complex overlap{};
  for (const auto& l : basis) overlap += post[l] * pre[l];
  return post[which] * pre[which] / overlap;
}

}  // namespace

TEST_CASE("weak value examples") {
  const double s = 1.0 / std::sqrt(3.0);
  const Ket pre({{"A", s}, {"B", s}, {"C", s}});
  const Bra post({{"A", s}, {"B", -s}, {"C", s}});
  const TwoStateVector tsv{pre, post};
  CHECK(std::abs(weak_value(tsv, PathOperator::projector("A")) - 1.0) <= 1e-12);
  CHECK(std::abs(weak_value(tsv, PathOperator::projector("B")) + 1.0) <= 1e-12);
  CHECK(std::abs(weak_value(tsv, PathOperator::projector("C")) - 1.0) <= 1e-12);

  const Ket a = Ket::unit(kABC, "A");
  const Bra b = adjoint(Ket::unit(kABC, "B"));
  CHECK_THROWS_AS(weak_value({a, b}, PathOperator::projector("A")), nmzi::UndefinedWeakValueError);
}

TEST_CASE("property: weak values match a dense oracle and sum to one") {
  std::mt19937_64 rng(31);
  const auto id = PathOperator::identity(kABC);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pre = random_ket(rng, kABC);
    const auto post = adjoint(random_ket(rng, kABC));
    if (std::abs(contract(post, pre)) < 1e-3) continue;
    const TwoStateVector tsv{pre, post};
    Complex sum{};
    for (const auto& l : kABC) {
      const auto w = weak_value(tsv, PathOperator::projector(l));
      CHECK(std::abs(w - dense_weak_value(pre, post, l, kABC)) <= 1e-10 * (1 + std::abs(w)));
      sum += w;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-10);
    CHECK(std::abs(weak_value(tsv, id) - 1.0) <= 1e-12);

    const Complex c{0.3, -2.0};
    const auto w0 = weak_value(tsv, PathOperator::projector("B"));
    CHECK(std::abs(weak_value({pre.scaled(c), post}, PathOperator::projector("B")) - w0) <= 1e-10 * (1 + std::abs(w0)));
    CHECK(std::abs(weak_value({pre, post.scaled(c)}, PathOperator::projector("B")) - w0) <= 1e-10 * (1 + std::abs(w0)));
  }
}

TEST_CASE("offer and confirmation components") {
  const auto psi = dce_state();
  const double h = 1.0 / std::numbers::sqrt2;
  const auto ow = offer_component(psi, "A");
  CHECK(ow == Ket({{"A", h}, {"B", 0.0}}));
  const auto cw = confirmation(psi, "A");
  CHECK(cw == adjoint(ow));
  CHECK(transaction_weight(cw, ow) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(offer_component(psi, "Z"), nmzi::ConfigError);

  const Ket phased({{"A", Complex{0.0, h}}, {"B", h}});
  CHECK(confirmation(phased, "A")["A"] == Complex{0.0, -h});
}

TEST_CASE("property: adjoint is an involution and contract is conjugate symmetric") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_ket(rng, kABC);
    const auto b = random_ket(rng, kABC);
    CHECK(adjoint(adjoint(a)) == a);
    CHECK(std::abs(contract(adjoint(a), b) - std::conj(contract(adjoint(b), a))) <= 1e-12);
    CHECK(std::abs(contract(adjoint(a), a).real() - a.norm2()) <= 1e-12);
  }
}

TEST_CASE("incipient transactions carry |<L|psi>|^2 projectors") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    auto psi = random_ket(rng, kABC);
    psi = psi.scaled(1.0 / std::sqrt(psi.norm2()));
    const auto its = incipient_transactions(psi, kABC);
    REQUIRE(its.size() == 3);
    PathOperator total;
    double sum = 0.0;
    for (const auto& it : its) {
      CHECK(it.weight == doctest::Approx(transaction_weight(confirmation(psi, it.absorber), offer_component(psi, it.absorber))));
      CHECK(it.projector * it.projector == it.projector);
      CHECK_FALSE(it.screen_position.has_value());
      total = total + it.projector;
      sum += it.weight;
    }
    CHECK(total == PathOperator::identity(kABC));
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    CHECK(weights_born_rule_check(psi, kABC) <= 1e-12);
  }
  const std::vector<PathLabel> twice{"A", "A"};
  CHECK_THROWS_AS(incipient_transactions(dce_state(), twice), nmzi::DomainError);
}

TEST_CASE("which-way absorbers split the dce state evenly") {
  const std::vector<PathLabel> ab{"A", "B"};
  const auto its = incipient_transactions(dce_state(), ab);
  CHECK(its[0].weight == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(its[1].weight == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(weights_born_rule_check(dce_state(), ab) <= 1e-12);

  const std::vector<PathLabel> a_only{"A"};
  CHECK(weights_born_rule_check(dce_state(), a_only) == doctest::Approx(0.5));
}

TEST_CASE("both-ways screen shows full-visibility fringes") {
  const auto screen = phase_ramp_screen(64);
  const auto its = dce_both_ways(dce_state(), screen);
  REQUIRE(its.size() == 64);
  double total = 0.0;
  for (std::size_t j = 0; j < its.size(); ++j) {
    // |(e^{i t} + e^{-i t}) / sqrt(2M)|^2 = 2 cos^2(t) / M with t = pi j / M
    const double t = std::numbers::pi * static_cast<double>(j) / 64.0;
    CHECK(std::abs(its[j].weight - 2.0 * std::cos(t) * std::cos(t) / 64.0) <= 1e-14);
    CHECK(its[j].screen_position == static_cast<double>(j));
    total += its[j].weight;
  }
  CHECK(std::abs(total - 1.0) <= 1e-12);
  CHECK(fringe_visibility(its) >= 0.99);

  const Ket which({{"A", 1.0}});
  const auto flat = dce_both_ways(which, screen);
  CHECK(fringe_visibility(flat) <= 1e-12);

  CHECK_THROWS_AS(dce_both_ways(Ket({{"A", 0.5}, {"C", 0.5}}), screen), nmzi::DomainError);
  CHECK_THROWS_AS(phase_ramp_screen(1), nmzi::DomainError);
}

TEST_CASE("attenuated offer wave") {
  const nmzi::modes::TransverseState beam(1.0, {{1.0, 0.0}});
  const auto clean = dfbv_attenuated_ow(0.0, beam);
  CHECK(clean.path == Ket({{"A", 0.0}, {"B", 0.0}, {"C", 1.0}}));

  const double eps = 0.01;
  const auto leaky = dfbv_attenuated_ow(eps, beam);
  const double expected = 2 * eps * eps + (1 - eps * eps) * (1 - eps * eps);
  CHECK(std::abs(leaky.path.norm2() - expected) <= 1e-15);

  CHECK_THROWS_AS(dfbv_attenuated_ow(-0.01, beam), nmzi::DomainError);
  CHECK_THROWS_AS(dfbv_attenuated_ow(0.6, beam), nmzi::DomainError);
}

TEST_CASE("detector bra is normalised and matches its expansion") {
  const auto d = dfbv_detector_bra();
  const double s = 1.0 / std::sqrt(3.0);
  CHECK(std::abs(d["C"] - s) <= 1e-15);
  CHECK(std::abs(d["A"] - Complex{0.0, -s}) <= 1e-15);
  CHECK(std::abs(d["B"] - Complex{0.0, s}) <= 1e-15);
  CHECK(std::abs(d.norm2() - 1.0) <= 1e-15);
}

TEST_CASE("Born weights at the detector") {
  const nmzi::modes::TransverseState beam(1.0, {{1.0, 0.0}});
  const auto amp2 = [&](double y) { return std::norm(nmzi::modes::position_eval(beam, y)); };

  const auto clean = dfbv_attenuated_ow(0.0, beam);
  for (double y : {-3.0, -0.5, 0.0, 1.2}) {
    const double lead = amp2(y) / 3.0;
    const auto bw = dfbv_born_weight_at(clean, y);
    CHECK(std::abs(bw.weight - lead) <= 1e-15 * std::max(lead, 1e-300));
    CHECK(std::abs(bw.cw.amplitude - std::conj(bw.circuit_amplitude)) == 0.0);
  }

  const double eps = 0.01;
  const auto leaky = dfbv_attenuated_ow(eps, beam);
  for (double y : {-3.0, -0.5, 0.0, 1.2}) {
    const double lead = amp2(y) / 3.0;
    const double w = dfbv_born_weight_at(leaky, y).weight;
    CHECK(std::abs(w - lead) <= 0.05 * lead);
    CHECK(w == doctest::Approx(lead * (1 + eps * eps) * (1 + eps * eps)).epsilon(1e-12));
  }

  CHECK(dfbv_born_weight_at(leaky, 200.0).weight == 0.0);
  CHECK(dfbv_born_weight(leaky, 0.0).weight == 0.0);
}

TEST_CASE("detection probability equals the grid sum of Born weights") {
  const nmzi::modes::TransverseState beam(1.0, {{1.0, 0.0}});
  for (double eps : {0.0, 0.01, 0.3}) {
    const auto ow = dfbv_attenuated_ow(eps, beam);
    const double sum = oracle::simpson([&](double y) { return dfbv_born_weight_at(ow, y).weight; }, -8, 8, 256);
    const double p = dfbv_detection_probability(ow);
    CHECK(std::abs(p - (1 + eps * eps) * (1 + eps * eps) / 3.0) <= 1e-12);
    CHECK(std::abs(sum - p) <= 1e-10);
  }
}
