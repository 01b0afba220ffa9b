#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "qseal/components.hpp"
#include "qseal/optics.hpp"

namespace qseal::adversary {

/// Measure each photon on the active fiber and resend a replica. Timing is
/// preserved; the entanglement is not.
struct InterceptResend {};

/// Bend-fiber leakage: extra loss, nothing else.
struct PassiveTap {
  double added_loss_db = 1.0;
};

struct CutFiber {};

/// Attacker blocks the active fiber and injects one weak classical pulse per
/// window, aimed at the window epoch with Gaussian timing error.
struct ClassicalSpoof {
  double pulse_rate_hz = 0.0;  ///< mean replica photons per second
  TimePs timing_error_sigma = 0;
};

using AttackKind = std::variant<InterceptResend, PassiveTap, CutFiber, ClassicalSpoof>;

struct AttackPlan {
  AttackKind kind = InterceptResend{};
  std::int64_t start_window = 0;
  std::int64_t end_window = 0;  ///< inclusive

  bool covers(std::int64_t window) const noexcept { return window >= start_window && window <= end_window; }
  void validate() const;
};

/// Immutable set of non-overlapping attack plans, sorted by start window.
class AttackSchedule {
 public:
  AttackSchedule() = default;
  /// Throws ConfigError when plans overlap or are individually invalid.
  explicit AttackSchedule(std::vector<AttackPlan> plans);

  const AttackPlan* in_force(std::int64_t window) const noexcept;
  std::span<const AttackPlan> plans() const noexcept { return plans_; }
  bool empty() const noexcept { return plans_.empty(); }

 private:
  std::vector<AttackPlan> plans_;
};

/// The unique plan covering `window`, or nullptr. Plans must not overlap.
const AttackPlan* attack_in_force(std::span<const AttackPlan> plans, std::int64_t window);

optics::JointPhotonState transform_state(const AttackKind& kind, optics::JointPhotonState state);

FiberChannel transform_channel(const AttackKind& kind, FiberChannel channel);

const char* kind_name(const AttackKind& kind) noexcept;

}  // namespace qseal::adversary
