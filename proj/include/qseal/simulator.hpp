#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qseal/adversary.hpp"
#include "qseal/components.hpp"
#include "qseal/rng.hpp"

namespace qseal {

/// Per-receiver event streams, each sorted by (time_tag, window_index).
struct EventStreams {
  std::vector<DetectionEvent> active;
  std::vector<DetectionEvent> reference;

  std::vector<DetectionEvent>& of(ReceiverId rx) noexcept { return rx == ReceiverId::Active ? active : reference; }
  const std::vector<DetectionEvent>& of(ReceiverId rx) const noexcept {
    return rx == ReceiverId::Active ? active : reference;
  }
};

/// Attack plan with its channel effects resolved once, ahead of the window loop.
struct PreparedAttack {
  const adversary::AttackPlan* plan = nullptr;
  double active_transmission = 1.0;
  double spoof_mean_photons = 0.0;  ///< per window; zero unless ClassicalSpoof
};

/// Samples the detection events of single windows. Holds only precomputed,
/// immutable parameters, so one sampler serves any number of threads.
class WindowSampler {
 public:
  /// Throws ConfigError when `setup` violates a component invariant.
  explicit WindowSampler(const LinkSetup& setup);

  PreparedAttack prepare(const adversary::AttackPlan& plan) const;

  /// Appends the window's events to `out` (active then reference, each in
  /// generation order).
  void sample(const PreparedAttack* attack, std::int64_t window_index, SplitMix64& rng,
              std::vector<DetectionEvent>& out) const;

  const LinkSetup& setup() const noexcept { return setup_; }

 private:
  struct Arm {
    double transmission = 1.0;
    double efficiency = 1.0;
    TimePs delay = 0;
    TimePs jitter = 0;
    std::poisson_distribution<unsigned>::param_type dark{1.0};
    bool has_dark = false;
  };

  TimePs photon_tag(const Arm& arm, TimePs epoch, bool long_path, TimePs extra_sigma, SplitMix64& rng) const;

  LinkSetup setup_;
  Arm active_;
  Arm reference_;
};

/// One window of the seal link: emit, attack, propagate, interfere, detect,
/// add dark counts. `attack` is the plan in force for this window, if any.
std::vector<DetectionEvent> simulate_window(const LinkSetup& setup, const adversary::AttackPlan* attack,
                                            std::int64_t window_index, SplitMix64& rng);

/// Deterministic multi-window driver. Window w always draws from
/// window_stream(seed, w), so results do not depend on how a run is chunked.
class Simulator {
 public:
  Simulator(const LinkSetup& setup, adversary::AttackSchedule attacks, std::uint64_t master_seed);

  /// Simulates windows [first, first + count).
  EventStreams run(std::int64_t first_window, std::int64_t count) const;

  const LinkSetup& setup() const noexcept { return sampler_.setup(); }
  const adversary::AttackSchedule& attacks() const noexcept { return attacks_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  WindowSampler sampler_;
  adversary::AttackSchedule attacks_;
  std::vector<PreparedAttack> prepared_;
  std::uint64_t seed_;
};

/// Sorts a stream into analytics order: time tag, then window index.
void sort_stream(std::vector<DetectionEvent>& events);

}  // namespace qseal
