#include "qseal/components.hpp"

#include <cmath>
#include <random>
#include <string>

#include "qseal/errors.hpp"

namespace qseal {

void SpdcSource::validate() const {
  if (!(mean_pairs_per_window > 0.0 && mean_pairs_per_window <= 0.2)) {
    throw ConfigError("source.mean_pairs_per_window must lie in (0, 0.2]; multi-pair emission is not modeled, got " +
                      std::to_string(mean_pairs_per_window));
  }
  if (!(source_visibility >= 0.0 && source_visibility <= 1.0)) {
    throw ConfigError("source.visibility must lie in [0, 1]");
  }
}

void WeakPulseSource::validate() const {
  if (!(mean_photons_per_pulse > 0.0 && mean_photons_per_pulse < 1.0)) {
    throw ConfigError("weak pulse mean photon number must lie in (0, 1)");
  }
}

double FiberChannel::transmission() const noexcept { return std::pow(10.0, -loss_db / 10.0); }

void FiberChannel::validate() const {
  if (!(loss_db >= 0.0) || !std::isfinite(loss_db)) throw ConfigError("channel loss_db must be >= 0");
  if (propagation_delay < 0) throw ConfigError("channel delay must be >= 0");
  if (!(decoherence_factor >= 0.0 && decoherence_factor <= 1.0)) {
    throw ConfigError("channel decoherence factor must lie in [0, 1]");
  }
}

void DetectorModel::validate() const {
  if (!(efficiency > 0.0 && efficiency <= 1.0)) throw ConfigError("detector efficiency must lie in (0, 1]");
  if (!(dark_rate_hz >= 0.0) || !std::isfinite(dark_rate_hz)) throw ConfigError("detector dark rate must be >= 0");
  if (jitter_sigma < 0) throw ConfigError("detector jitter must be >= 0");
}

std::vector<double> quadrature_phase_set() {
  return {0.0, 0.5 * optics::kPi, optics::kPi, 1.5 * optics::kPi};
}

void MziReceiver::validate(TimePs coincidence_window) const {
  if (path_delay <= 3 * coincidence_window) {
    throw ConfigError("receiver path delay must exceed 3x the coincidence window so peaks separate");
  }
  if (phase_set.empty()) throw ConfigError("receiver phase set must not be empty");
  for (double p : phase_set) {
    if (!(p >= 0.0 && p < optics::kTwoPi)) throw ConfigError("phase set values must lie in [0, 2pi)");
  }
  detector.validate();
}

void LinkSetup::validate() const {
  source.validate();
  active_channel.validate();
  reference_channel.validate();
  if (coincidence_window <= 0) throw ConfigError("coincidence window must be > 0");
  if (window_duration <= 0) throw ConfigError("window duration must be > 0");
  active_rx.validate(coincidence_window);
  reference_rx.validate(coincidence_window);
  if (active_rx.path_delay != reference_rx.path_delay) {
    throw ConfigError("active and reference interferometers must share the same path delay");
  }
  if (dark_per_window(ReceiverId::Active) >= 1.0 || dark_per_window(ReceiverId::Reference) >= 1.0) {
    throw ConfigError("dark rate too high for the window duration (>= 1 expected dark count per window)");
  }
}

double LinkSetup::dark_per_window(ReceiverId rx) const noexcept {
  return receiver(rx).detector.dark_rate_hz * static_cast<double>(window_duration) / static_cast<double>(kPsPerSecond);
}

double draw_phase(const MziReceiver& receiver, SplitMix64& rng) {
  if (receiver.phase_set.size() == 1) return receiver.phase_set.front();
  std::uniform_int_distribution<std::size_t> pick(0, receiver.phase_set.size() - 1);
  return receiver.phase_set[pick(rng)];
}

optics::JointPhotonState emit_window(const SpdcSource& source, SplitMix64& rng) {
  std::bernoulli_distribution pair(source.mean_pairs_per_window);
  if (pair(rng)) return optics::JointPhotonState::entangled(source.source_visibility, source.pump_frequency);
  return optics::JointPhotonState::vacuum(source.pump_frequency);
}

unsigned emit_weak_pulse(const WeakPulseSource& source, SplitMix64& rng) {
  std::poisson_distribution<unsigned> photons(source.mean_photons_per_pulse);
  return photons(rng);
}

}  // namespace qseal
