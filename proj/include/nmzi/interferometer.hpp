#pragma once

// Nested Mach-Zehnder topology and exact two-degree-of-freedom propagation.
//
//   source -> outer split -+-> C --------------------------------+-> final merge -> D
//                          |                                     |               -> Dark_outer
//                          +-> E -> inner split -+-> A -+-> inner merge -> F ----+
//                                                +-> B -+               -> Dark_inner
//
// Every route from the source to an exit port contributes one Gaussian branch
// whose coefficient is the product of splitter amplitudes and segment
// transmissions along the route and whose shift is the sum of the tilts of
// the mirrors it reflects from.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "nmzi/modes.hpp"

namespace nmzi::interferometer {

enum class Mirror { A, B, C, E, F };
inline constexpr std::array kMirrors{Mirror::A, Mirror::B, Mirror::C, Mirror::E, Mirror::F};

enum class Port { D, DarkOuter, DarkInner };
inline constexpr std::array kPorts{Port::D, Port::DarkOuter, Port::DarkInner};

/// Attenuable beam segments, named after where they start and end.
enum class Segment { EToInner, AToOut, BToOut, FToD, CToD };
inline constexpr std::array kSegments{Segment::EToInner, Segment::AToOut, Segment::BToOut,
                                      Segment::FToD, Segment::CToD};

/// Inner-merge phase toward F. Destructive reproduces the minus sign on the B route.
enum class Tuning { Destructive, Constructive };

std::string_view to_string(Mirror m);
std::string_view to_string(Port p);
std::string_view to_string(Segment s);  ///< "E->inner", "A->out", "B->out", "F->D", "C->D"
std::string_view to_string(Tuning t);

std::optional<Mirror> parse_mirror(std::string_view s);
/// Accepts the ASCII names above and the same names with a unicode arrow.
std::optional<Segment> parse_segment(std::string_view s);
std::optional<Tuning> parse_tuning(std::string_view s);

struct NetworkConfig {
  double sigma = 1.0;
  /// Amplitudes (to C arm, to E arm); the final merge reuses them.
  std::array<double, 2> outer_split{0.57735026918962576451, 0.81649658092772603273};
  Tuning inner_tuning = Tuning::Destructive;
  std::array<double, kSegments.size()> transmissions{1.0, 1.0, 1.0, 1.0, 1.0};

  double transmission(Segment s) const { return transmissions[static_cast<std::size_t>(s)]; }
  bool lossless() const;
  /// Throws DomainError on a non-unit outer split, a transmission outside [0, 1] or sigma <= 0.
  void validate() const;

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

/// Per-mirror transverse-momentum kicks; unset mirrors are zero.
class TiltAssignment {
 public:
  TiltAssignment() = default;

  double operator[](Mirror m) const noexcept { return kappa_[static_cast<std::size_t>(m)]; }
  double& operator[](Mirror m) noexcept { return kappa_[static_cast<std::size_t>(m)]; }

  TiltAssignment scaled(double factor) const;
  double max_abs() const;

  friend bool operator==(const TiltAssignment&, const TiltAssignment&) = default;

 private:
  std::array<double, kMirrors.size()> kappa_{};
};

struct ExitStates {
  modes::TransverseState detector;
  modes::TransverseState dark_outer;
  modes::TransverseState dark_inner;

  const modes::TransverseState& at(Port p) const;
};

/// Exact propagation. Routes whose amplitude is exactly zero (blocked segment,
/// zero splitter arm) contribute no branch. The D-port branch order is
/// C route, A route, B route.
ExitStates propagate(const NetworkConfig& config, const TiltAssignment& tilts);

struct ConservationReport {
  double total = 0.0;   ///< summed detection probability over all exit ports
  bool lossy = false;   ///< some transmission is below 1
};

/// Sums quadrature probabilities over D, Dark_outer and Dark_inner.
ConservationReport conservation_report(const NetworkConfig& config, const TiltAssignment& tilts);

/// Leading-order D-port state for small tilts: (1/3) Psi(k - (kC + kA - kB)).
modes::TransverseState first_order_state(const TiltAssignment& tilts, double sigma = 1.0);

/// Copy of config with one segment's transmission replaced.
NetworkConfig set_gap(const NetworkConfig& config, Segment segment, double transmission);
/// As above; throws ConfigError for an unknown segment label.
NetworkConfig set_gap(const NetworkConfig& config, std::string_view segment, double transmission);

}  // namespace nmzi::interferometer
