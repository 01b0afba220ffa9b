#pragma once

// Measurement statistics for single qubits and for the two-photon
// (Franson) interference that the seal monitors. Everything here is a pure
// function of its arguments.

#include <array>
#include <cstddef>
#include <variant>

namespace qseal::optics {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Bloch-sphere angles of a pure qubit state cos(theta)|0> + e^{i phi} sin(theta)|1>.
struct QubitAngles {
  double theta = 0.0;  ///< polar angle, [0, pi]
  double phi = 0.0;    ///< azimuth, [0, 2pi)
};

struct MeasureProbs {
  double p0 = 1.0;
  double p1 = 0.0;
};

/// Outcome probabilities of a computational-basis measurement. Throws
/// DomainError for out-of-range angles.
MeasureProbs qubit_measure_probs(const QubitAngles& angles);

/// Frequency-entangled pair from the SPDC source, characterized by the
/// visibility its two-photon interference would show on ideal receivers.
struct EntangledPair {
  double source_visibility = 1.0;

  friend bool operator==(const EntangledPair&, const EntangledPair&) = default;
};

/// The active mode no longer carries the entangled partner of the reference
/// photon: it was cut, or replaced by the attacker's classical light. The
/// reference photon of the original pair is still in flight.
struct ClassicalReplica {
  friend bool operator==(const ClassicalReplica&, const ClassicalReplica&) = default;
};

/// No pair emitted this window.
struct Vacuum {
  friend bool operator==(const Vacuum&, const Vacuum&) = default;
};

struct JointPhotonState {
  std::variant<EntangledPair, ClassicalReplica, Vacuum> kind = Vacuum{};
  double pump_frequency = 0.0;  ///< rad/s, descriptive only

  static JointPhotonState entangled(double source_visibility, double pump_frequency = 0.0);
  static JointPhotonState replica(double pump_frequency = 0.0);
  static JointPhotonState vacuum(double pump_frequency = 0.0);

  bool is_entangled() const noexcept { return std::holds_alternative<EntangledPair>(kind); }
  bool is_replica() const noexcept { return std::holds_alternative<ClassicalReplica>(kind); }
  bool is_vacuum() const noexcept { return std::holds_alternative<Vacuum>(kind); }

  /// Source visibility of an entangled pair; UnsupportedStateError otherwise.
  double visibility() const;

  friend bool operator==(const JointPhotonState&, const JointPhotonState&) = default;
};

/// Modulator settings in force at the two receivers for one window.
struct PhasePair {
  double active = 0.0;
  double reference = 0.0;

  /// Phase sum reduced to [0, 2pi).
  double sum() const noexcept;
};

/// Which interferometer arm each photon took: (active, reference).
enum class PathPair : std::size_t { SS = 0, SL = 1, LS = 2, LL = 3 };

/// Path statistics conditional on both photons leaving their interferometers
/// through the monitored output ports.
struct JointOutcomeDistribution {
  std::array<double, 4> p{0.25, 0.25, 0.25, 0.25};

  double operator[](PathPair k) const noexcept { return p[static_cast<std::size_t>(k)]; }
};

/// Which photons exit through the detector-side port of their interferometer's
/// second beam splitter. The split is correlated for interfering pairs: the
/// probability both reach the detectors is (2 + V cos Phi)/8, while each
/// photon's own chance stays 1/2.
struct PortDistribution {
  double both = 0.25;
  double active_only = 0.25;
  double reference_only = 0.25;
  double neither = 0.25;
};

JointOutcomeDistribution joint_path_distribution(const JointPhotonState& state, const PhasePair& phases);

/// Inverse-CDF draw from `dist` given a uniform variate u in [0, 1).
PathPair sample_path_pair(const JointOutcomeDistribution& dist, double u) noexcept;

bool active_took_long(PathPair p) noexcept;
bool reference_took_long(PathPair p) noexcept;

/// Unconditional probability (per pair reaching both receivers) of an
/// indistinguishable SS/LL detection: (1/8)(1 + V cos Phi).
double central_peak_probability(const JointPhotonState& state, const PhasePair& phases);

PortDistribution monitored_port_distribution(const JointPhotonState& state, const PhasePair& phases);

/// Scales the visibility of an entangled pair by `factor`; other kinds pass
/// through unchanged.
JointPhotonState apply_decoherence(JointPhotonState state, double factor);

/// (c_max - c_min) / (c_max + c_min).
double fringe_visibility(double c_max, double c_min);

}  // namespace qseal::optics
