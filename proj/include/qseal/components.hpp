#pragma once

// Physical components of a seal link: SPDC and weak-pulse sources, fiber
// channels, unbalanced Mach-Zehnder receivers, and their detectors.
//
// Times are integer picoseconds throughout so that event logs round-trip
// exactly.

#include <cstdint>
#include <vector>

#include "qseal/optics.hpp"
#include "qseal/rng.hpp"

namespace qseal {

using TimePs = std::int64_t;

inline constexpr TimePs kPsPerSecond = 1'000'000'000'000;

struct SpdcSource {
  double mean_pairs_per_window = 0.05;  ///< mu, aggregated over the pump pulse
  double source_visibility = 0.98;
  double pump_frequency = 0.0;          ///< rad/s, descriptive only

  /// Throws ConfigError unless 0 < mu <= 0.2 and visibility in [0, 1].
  void validate() const;
};

struct WeakPulseSource {
  double mean_photons_per_pulse = 0.1;

  void validate() const;
};

struct FiberChannel {
  double loss_db = 0.0;
  TimePs propagation_delay = 100'000;
  double decoherence_factor = 1.0;

  double transmission() const noexcept;
  void validate() const;
};

struct DetectorModel {
  double efficiency = 0.8;
  double dark_rate_hz = 100.0;
  TimePs jitter_sigma = 30;

  void validate() const;
};

/// Phase set {0, pi/2, pi, 3pi/2} used by the visibility estimator.
std::vector<double> quadrature_phase_set();

struct MziReceiver {
  TimePs path_delay = 1'000;  ///< long minus short arm
  std::vector<double> phase_set = quadrature_phase_set();
  DetectorModel detector{};

  void validate(TimePs coincidence_window) const;
};

enum class ReceiverId : std::uint8_t { Active, Reference };
enum class Origin : std::uint8_t { Photon, DarkCount };

/// One detector click. `origin` exists for test oracles; analytics never read it.
struct DetectionEvent {
  ReceiverId receiver = ReceiverId::Active;
  TimePs time_tag = 0;
  std::int64_t window_index = 0;
  double phase_applied = 0.0;
  Origin origin = Origin::Photon;

  friend bool operator==(const DetectionEvent&, const DetectionEvent&) = default;
};

/// Everything the physical layer of one seal link is made of.
struct LinkSetup {
  SpdcSource source{};
  FiberChannel active_channel{3.0, 100'000, 1.0};
  FiberChannel reference_channel{1.0, 100'000, 1.0};
  MziReceiver active_rx{};
  MziReceiver reference_rx{};
  TimePs window_duration = 1'000'000;   ///< 1 us
  TimePs coincidence_window = 100;      ///< tau_c

  void validate() const;

  /// Expected dark clicks per window on each receiver.
  double dark_per_window(ReceiverId rx) const noexcept;

  const MziReceiver& receiver(ReceiverId rx) const noexcept {
    return rx == ReceiverId::Active ? active_rx : reference_rx;
  }
  const FiberChannel& channel(ReceiverId rx) const noexcept {
    return rx == ReceiverId::Active ? active_channel : reference_channel;
  }
};

/// Uniform draw from the receiver's phase set.
double draw_phase(const MziReceiver& receiver, SplitMix64& rng);

/// Entangled pair with probability mu, otherwise vacuum. Never more than one pair.
optics::JointPhotonState emit_window(const SpdcSource& source, SplitMix64& rng);

/// Poisson photon number of one attenuated laser pulse.
unsigned emit_weak_pulse(const WeakPulseSource& source, SplitMix64& rng);

}  // namespace qseal
