#pragma once

// Discrete-basis pre/post-selection algebra: kets and bras over path labels,
// weak values, offer/confirmation components and incipient transactions,
// plus the two-degree-of-freedom offer wave of the nested interferometer.

#include <complex>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nmzi/modes.hpp"

namespace nmzi::transactional {

using Complex = std::complex<double>;
using PathLabel = std::string;

struct KetTag {};
struct BraTag {};

/// Complex amplitudes over an explicit set of path labels. Labels present with
/// a zero amplitude are still part of the basis.
template <typename Tag>
class PathVector {
 public:
  PathVector() = default;
  explicit PathVector(std::map<PathLabel, Complex> amplitudes);

  /// Unit vector on `which` over the given basis (which is added if absent).
  static PathVector unit(std::span<const PathLabel> basis, const PathLabel& which);

  bool contains(const PathLabel& label) const { return amps_.contains(label); }
  /// Zero for labels outside the basis.
  Complex operator[](const PathLabel& label) const;
  const std::map<PathLabel, Complex>& amplitudes() const noexcept { return amps_; }
  std::vector<PathLabel> labels() const;

  double norm2() const;
  PathVector scaled(Complex factor) const;

  friend PathVector operator+(const PathVector& lhs, const PathVector& rhs) {
    auto out = lhs.amps_;
    for (const auto& [label, a] : rhs.amps_) out[label] += a;
    return PathVector(std::move(out));
  }
  friend bool operator==(const PathVector&, const PathVector&) = default;

 private:
  std::map<PathLabel, Complex> amps_;
};

using Ket = PathVector<KetTag>;
using Bra = PathVector<BraTag>;

Bra adjoint(const Ket& ket);
Ket adjoint(const Bra& bra);

/// <bra|ket>
Complex contract(const Bra& bra, const Ket& ket);

/// Sparse matrix over path labels, entry (row, col) = <row|O|col>.
class PathOperator {
 public:
  using Index = std::pair<PathLabel, PathLabel>;

  PathOperator() = default;
  explicit PathOperator(std::map<Index, Complex> entries);

  /// |label><label|
  static PathOperator projector(const PathLabel& label);
  static PathOperator identity(std::span<const PathLabel> labels);

  Complex operator()(const PathLabel& row, const PathLabel& col) const;
  const std::map<Index, Complex>& entries() const noexcept { return entries_; }

  Ket apply(const Ket& ket) const;
  /// <bra|O|ket>
  Complex matrix_element(const Bra& bra, const Ket& ket) const;

  PathOperator scaled(Complex factor) const;
  friend PathOperator operator+(const PathOperator& lhs, const PathOperator& rhs);
  friend PathOperator operator*(const PathOperator& lhs, const PathOperator& rhs);
  friend bool operator==(const PathOperator&, const PathOperator&) = default;

 private:
  std::map<Index, Complex> entries_;
};

/// Pre-selected ket and post-selected bra, held as a pair and never contracted
/// except inside weak_value.
struct TwoStateVector {
  Ket pre;
  Bra post;
};

struct IncipientTransaction {
  PathLabel absorber;
  double weight = 0.0;
  PathOperator projector;
  std::optional<double> screen_position;
};

/// <post|O|pre> / <post|pre>. Throws UndefinedWeakValueError when |<post|pre>| <= 1e-12.
Complex weak_value(const TwoStateVector& tsv, const PathOperator& op);

/// <L|psi> |L>. Throws ConfigError when the label is outside psi's basis.
Ket offer_component(const Ket& psi, const PathLabel& absorber);

/// <psi|L> <L|, the adjoint of offer_component.
Bra confirmation(const Ket& psi, const PathLabel& absorber);

/// Contraction of a confirmation with an offer component: the weight their outer product carries.
double transaction_weight(const Bra& cw, const Ket& ow);

/// One weighted projector |<L|psi>|^2 |L><L| per absorber. Throws DomainError on repeated absorbers.
std::vector<IncipientTransaction> incipient_transactions(const Ket& psi, std::span<const PathLabel> absorbers);

/// |sum of weights - 1|; zero (to rounding) exactly when the absorbers cover psi's support.
double weights_born_rule_check(const Ket& psi, std::span<const PathLabel> absorbers);

/// (|A> + |B>) / sqrt 2
Ket dce_state();

struct ScreenPoint {
  double x = 0.0;
  Complex amp_a;  ///< <X|A>
  Complex amp_b;  ///< <X|B>
};

/// Both-ways detection on a screen: weight |psi_A <X|A> + psi_B <X|B>|^2 per point.
/// Throws DomainError when psi has amplitude outside {A, B}.
std::vector<IncipientTransaction> dce_both_ways(const Ket& psi, std::span<const ScreenPoint> screen);

/// M points X_j = j with <X_j|A> = e^{+i pi j/M}/sqrt M and <X_j|B> = e^{-i pi j/M}/sqrt M.
/// The two columns are orthonormal, so a normalised psi on {A, B} spends all its weight on the screen.
std::vector<ScreenPoint> phase_ramp_screen(std::size_t points);

/// (max - min) / (max + min) over the transaction weights.
double fringe_visibility(std::span<const IncipientTransaction> transactions);

// Two-degree-of-freedom offer wave reaching D:
//   (eps|A> - eps|B> + (1 - eps^2)|C>) (x) Psi(y)|y>
// and the detector bra <D| = (1/sqrt3)<C| - i sqrt(2/3)<F| with
// <F| = (<A| - <B|)/sqrt2 on the inner-arm labels.

struct DfbvOfferWave {
  double epsilon = 0.0;
  Ket path;  ///< over {A, B, C}
  modes::TransverseState transverse;
};

/// Throws DomainError for epsilon outside [0, 0.5].
DfbvOfferWave dfbv_attenuated_ow(double epsilon, modes::TransverseState transverse);

/// <D| expanded onto {A, B, C}.
Bra dfbv_detector_bra();

/// Confirmation generated at absorber element y: amplitude * (<D| (x) <y|).
struct DfbvConfirmation {
  Complex amplitude;
  Bra detector;
};

struct DfbvBornWeight {
  DfbvConfirmation cw;
  Complex circuit_amplitude;  ///< (<D| (x) <y|) |Psi_{y,z}>
  double weight = 0.0;        ///< |circuit_amplitude|^2
};

/// y_amp is the transverse position amplitude Psi(y) at the absorber element.
DfbvBornWeight dfbv_born_weight(const DfbvOfferWave& ow, Complex y_amp);
/// Evaluates Psi(y) from the offer wave's transverse state.
DfbvBornWeight dfbv_born_weight_at(const DfbvOfferWave& ow, double y);

/// |<D|path>|^2 * ||Psi||^2, the offer wave's total detection probability at D.
double dfbv_detection_probability(const DfbvOfferWave& ow);

}  // namespace nmzi::transactional
