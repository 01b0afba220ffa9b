#include "qseal/optics.hpp"

#include <cmath>
#include <string>

#include "qseal/errors.hpp"

namespace qseal::optics {

namespace {

void require_visibility(double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw DomainError("source visibility must lie in [0, 1], got " + std::to_string(v));
  }
}

double entangled_visibility(const JointPhotonState& state, const char* op) {
  if (!state.is_entangled()) {
    throw UnsupportedStateError(std::string(op) + " requires an entangled pair");
  }
  return state.visibility();
}

}  // namespace

MeasureProbs qubit_measure_probs(const QubitAngles& angles) {
  if (!(angles.theta >= 0.0 && angles.theta <= kPi)) {
    throw DomainError("theta must lie in [0, pi]");
  }
  if (!(angles.phi >= 0.0 && angles.phi < kTwoPi)) {
    throw DomainError("phi must lie in [0, 2pi)");
  }
  const double c0 = std::cos(angles.theta);
  const double p0 = c0 * c0;
  return {p0, 1.0 - p0};
}

JointPhotonState JointPhotonState::entangled(double source_visibility, double pump_frequency) {
  require_visibility(source_visibility);
  return {EntangledPair{source_visibility}, pump_frequency};
}

JointPhotonState JointPhotonState::replica(double pump_frequency) {
  return {ClassicalReplica{}, pump_frequency};
}

JointPhotonState JointPhotonState::vacuum(double pump_frequency) {
  return {Vacuum{}, pump_frequency};
}

double JointPhotonState::visibility() const {
  if (const auto* pair = std::get_if<EntangledPair>(&kind)) {
    return pair->source_visibility;
  }
  throw UnsupportedStateError("only entangled pairs carry a visibility");
}

double PhasePair::sum() const noexcept {
  double s = std::fmod(active + reference, kTwoPi);
  if (s < 0.0) s += kTwoPi;
  return s;
}

JointOutcomeDistribution joint_path_distribution(const JointPhotonState& state, const PhasePair& phases) {
  const double v = entangled_visibility(state, "joint_path_distribution");
  // Raw weights: SS and LL share (1/4)(1 + V cos Phi); SL and LS get 1/8 each.
  const double interfering = 0.25 * (1.0 + v * std::cos(phases.active + phases.reference));
  const double mixed = 0.125;
  const double norm = interfering + 2.0 * mixed;
  JointOutcomeDistribution out;
  out.p[static_cast<std::size_t>(PathPair::SS)] = 0.5 * interfering / norm;
  out.p[static_cast<std::size_t>(PathPair::LL)] = 0.5 * interfering / norm;
  out.p[static_cast<std::size_t>(PathPair::SL)] = mixed / norm;
  out.p[static_cast<std::size_t>(PathPair::LS)] = mixed / norm;
  return out;
}

PathPair sample_path_pair(const JointOutcomeDistribution& dist, double u) noexcept {
  double acc = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    acc += dist.p[k];
    if (u < acc) return static_cast<PathPair>(k);
  }
  return PathPair::LL;
}

bool active_took_long(PathPair p) noexcept { return p == PathPair::LS || p == PathPair::LL; }
bool reference_took_long(PathPair p) noexcept { return p == PathPair::SL || p == PathPair::LL; }

double central_peak_probability(const JointPhotonState& state, const PhasePair& phases) {
  const double v = entangled_visibility(state, "central_peak_probability");
  return 0.125 * (1.0 + v * std::cos(phases.active + phases.reference));
}

PortDistribution monitored_port_distribution(const JointPhotonState& state, const PhasePair& phases) {
  const double v = entangled_visibility(state, "monitored_port_distribution");
  // Flipping one photon's output port flips the sign of that photon's long-arm
  // amplitude, so the interference term changes sign for mixed-port outcomes.
  const double modulation = v * std::cos(phases.active + phases.reference);
  const double same = (2.0 + modulation) / 8.0;
  const double mixed = (2.0 - modulation) / 8.0;
  return {same, mixed, mixed, same};
}

JointPhotonState apply_decoherence(JointPhotonState state, double factor) {
  if (!(factor >= 0.0 && factor <= 1.0)) {
    throw DomainError("decoherence factor must lie in [0, 1]");
  }
  if (auto* pair = std::get_if<EntangledPair>(&state.kind)) {
    pair->source_visibility *= factor;
  }
  return state;
}

double fringe_visibility(double c_max, double c_min) {
  if (c_min < 0.0 || c_max < 0.0) {
    throw DomainError("counts must be non-negative");
  }
  if (c_min > c_max) {
    throw DomainError("fringe_visibility expects c_max >= c_min");
  }
  if (c_max + c_min <= 0.0) {
    throw DomainError("visibility undefined with zero counts");
  }
  return (c_max - c_min) / (c_max + c_min);
}

}  // namespace qseal::optics
