#include "nmzi/transactional.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "nmzi/errors.hpp"

namespace nmzi::transactional {
namespace {

constexpr double kOrthogonalityFloor = 1e-12;
constexpr double kMaxEpsilon = 0.5;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

template <typename Out, typename In>
Out conjugate_into(const In& in) {
  std::map<PathLabel, Complex> out;
  for (const auto& [label, a] : in.amplitudes()) out.emplace(label, std::conj(a));
  return Out(std::move(out));
}

}  // namespace

template <typename Tag>
PathVector<Tag>::PathVector(std::map<PathLabel, Complex> amplitudes) : amps_(std::move(amplitudes)) {
  for (const auto& [label, a] : amps_) {
    if (!finite(a)) throw DomainError("non-finite amplitude on path " + label);
  }
}

template <typename Tag>
PathVector<Tag> PathVector<Tag>::unit(std::span<const PathLabel> basis, const PathLabel& which) {
  std::map<PathLabel, Complex> amps;
  for (const auto& label : basis) amps.emplace(label, Complex{});
  amps[which] = 1.0;
  return PathVector(std::move(amps));
}

template <typename Tag>
Complex PathVector<Tag>::operator[](const PathLabel& label) const {
  auto it = amps_.find(label);
  return it == amps_.end() ? Complex{} : it->second;
}

template <typename Tag>
std::vector<PathLabel> PathVector<Tag>::labels() const {
  std::vector<PathLabel> out;
  for (const auto& [label, a] : amps_) out.push_back(label);
  return out;
}

template <typename Tag>
double PathVector<Tag>::norm2() const {
  double sum = 0.0;
  for (const auto& [label, a] : amps_) sum += std::norm(a);
  return sum;
}

template <typename Tag>
PathVector<Tag> PathVector<Tag>::scaled(Complex factor) const {
  auto out = amps_;
  for (auto& [label, a] : out) a *= factor;
  return PathVector(std::move(out));
}

template class PathVector<KetTag>;
template class PathVector<BraTag>;

Bra adjoint(const Ket& ket) { return conjugate_into<Bra>(ket); }
Ket adjoint(const Bra& bra) { return conjugate_into<Ket>(bra); }

Complex contract(const Bra& bra, const Ket& ket) {
  Complex sum{};
  for (const auto& [label, b] : bra.amplitudes()) sum += b * ket[label];
  return sum;
}

PathOperator::PathOperator(std::map<Index, Complex> entries) : entries_(std::move(entries)) {
  for (const auto& [idx, v] : entries_) {
    if (!finite(v)) throw DomainError("non-finite operator entry");
  }
}

PathOperator PathOperator::projector(const PathLabel& label) {
  return PathOperator({{{label, label}, Complex{1.0, 0.0}}});
}

PathOperator PathOperator::identity(std::span<const PathLabel> labels) {
  std::map<Index, Complex> entries;
  for (const auto& l : labels) entries[{l, l}] = 1.0;
  return PathOperator(std::move(entries));
}

Complex PathOperator::operator()(const PathLabel& row, const PathLabel& col) const {
  auto it = entries_.find({row, col});
  return it == entries_.end() ? Complex{} : it->second;
}

Ket PathOperator::apply(const Ket& ket) const {
  auto out = ket.amplitudes();
  for (auto& [label, a] : out) a = 0.0;
  for (const auto& [idx, v] : entries_) out[idx.first] += v * ket[idx.second];
  return Ket(std::move(out));
}

Complex PathOperator::matrix_element(const Bra& bra, const Ket& ket) const {
  Complex sum{};
  for (const auto& [idx, v] : entries_) sum += bra[idx.first] * v * ket[idx.second];
  return sum;
}

PathOperator PathOperator::scaled(Complex factor) const {
  auto out = entries_;
  for (auto& [idx, v] : out) v *= factor;
  return PathOperator(std::move(out));
}

PathOperator operator+(const PathOperator& lhs, const PathOperator& rhs) {
  auto out = lhs.entries_;
  for (const auto& [idx, v] : rhs.entries_) out[idx] += v;
  return PathOperator(std::move(out));
}

PathOperator operator*(const PathOperator& lhs, const PathOperator& rhs) {
  std::map<PathOperator::Index, Complex> out;
  for (const auto& [li, lv] : lhs.entries_) {
    for (const auto& [ri, rv] : rhs.entries_) {
      if (li.second == ri.first) out[{li.first, ri.second}] += lv * rv;
    }
  }
  return PathOperator(std::move(out));
}

Complex weak_value(const TwoStateVector& tsv, const PathOperator& op) {
  const Complex overlap = contract(tsv.post, tsv.pre);
  if (!(std::abs(overlap) > kOrthogonalityFloor)) {
    throw UndefinedWeakValueError("weak value undefined: pre- and post-selected states are orthogonal");
  }
  return op.matrix_element(tsv.post, tsv.pre) / overlap;
}

Ket offer_component(const Ket& psi, const PathLabel& absorber) {
  if (!psi.contains(absorber)) throw ConfigError("absorber '" + absorber + "' is not in the state's basis");
  auto amps = psi.amplitudes();
  for (auto& [label, a] : amps) {
    if (label != absorber) a = 0.0;
  }
  return Ket(std::move(amps));
}

Bra confirmation(const Ket& psi, const PathLabel& absorber) { return adjoint(offer_component(psi, absorber)); }

double transaction_weight(const Bra& cw, const Ket& ow) { return contract(cw, ow).real(); }

std::vector<IncipientTransaction> incipient_transactions(const Ket& psi, std::span<const PathLabel> absorbers) {
  std::set<PathLabel> seen;
  std::vector<IncipientTransaction> out;
  for (const auto& label : absorbers) {
    if (!seen.insert(label).second) throw DomainError("absorber '" + label + "' listed twice");
    out.push_back({label, std::norm(psi[label]), PathOperator::projector(label), std::nullopt});
  }
  return out;
}

double weights_born_rule_check(const Ket& psi, std::span<const PathLabel> absorbers) {
  double sum = 0.0;
  for (const auto& it : incipient_transactions(psi, absorbers)) sum += it.weight;
  return std::abs(sum - 1.0);
}

Ket dce_state() {
  const double a = 1.0 / std::numbers::sqrt2;
  return Ket({{"A", a}, {"B", a}});
}

std::vector<IncipientTransaction> dce_both_ways(const Ket& psi, std::span<const ScreenPoint> screen) {
  for (const auto& [label, a] : psi.amplitudes()) {
    if (label != "A" && label != "B" && a != Complex{}) {
      throw DomainError("both-ways screen needs a state supported on {A, B}; found amplitude on " + label);
    }
  }
  const Complex psi_a = psi["A"];
  const Complex psi_b = psi["B"];
  std::vector<IncipientTransaction> out;
  out.reserve(screen.size());
  for (std::size_t j = 0; j < screen.size(); ++j) {
    const auto& p = screen[j];
    const PathLabel label = "X" + std::to_string(j);
    out.push_back({label, std::norm(psi_a * p.amp_a + psi_b * p.amp_b), PathOperator::projector(label), p.x});
  }
  return out;
}

std::vector<ScreenPoint> phase_ramp_screen(std::size_t points) {
  if (points < 2) throw DomainError("screen needs at least two points");
  const double m = static_cast<double>(points);
  const double scale = 1.0 / std::sqrt(m);
  std::vector<ScreenPoint> out;
  out.reserve(points);
  for (std::size_t j = 0; j < points; ++j) {
    const double phase = std::numbers::pi * static_cast<double>(j) / m;
    out.push_back({static_cast<double>(j), std::polar(scale, phase), std::polar(scale, -phase)});
  }
  return out;
}

double fringe_visibility(std::span<const IncipientTransaction> transactions) {
  if (transactions.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(transactions.begin(), transactions.end(),
                                            [](const auto& a, const auto& b) { return a.weight < b.weight; });
  const double sum = hi->weight + lo->weight;
  return sum > 0.0 ? (hi->weight - lo->weight) / sum : 0.0;
}

DfbvOfferWave dfbv_attenuated_ow(double epsilon, modes::TransverseState transverse) {
  if (!(epsilon >= 0.0 && epsilon <= kMaxEpsilon)) {
    throw DomainError("leakage amplitude epsilon must lie in [0, 0.5]");
  }
  Ket path({{"A", epsilon}, {"B", -epsilon}, {"C", 1.0 - epsilon * epsilon}});
  return {epsilon, std::move(path), std::move(transverse)};
}

Bra dfbv_detector_bra() {
  const double c = 1.0 / std::sqrt(3.0);
  // -i sqrt(2/3) <F| with <F| = (<A| - <B|)/sqrt2
  const Complex inner{0.0, -std::sqrt(2.0 / 3.0) / std::numbers::sqrt2};
  return Bra({{"A", inner}, {"B", -inner}, {"C", c}});
}

DfbvBornWeight dfbv_born_weight(const DfbvOfferWave& ow, Complex y_amp) {
  const Bra d = dfbv_detector_bra();
  const Complex amplitude = contract(d, ow.path) * y_amp;
  return {{std::conj(amplitude), d}, amplitude, std::norm(amplitude)};
}

DfbvBornWeight dfbv_born_weight_at(const DfbvOfferWave& ow, double y) {
  return dfbv_born_weight(ow, modes::position_eval(ow.transverse, y));
}

double dfbv_detection_probability(const DfbvOfferWave& ow) {
  return std::norm(contract(dfbv_detector_bra(), ow.path)) * modes::total_probability(ow.transverse);
}

}  // namespace nmzi::transactional
