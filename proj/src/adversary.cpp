#include "qseal/adversary.hpp"

#include <algorithm>
#include <string>

#include "qseal/errors.hpp"

namespace qseal::adversary {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

void AttackPlan::validate() const {
  if (start_window < 0 || start_window > end_window) {
    throw ConfigError("attack window range must satisfy 0 <= start <= end");
  }
  std::visit(overloaded{
                 [](const PassiveTap& tap) {
                   if (!(tap.added_loss_db > 0.0)) throw ConfigError("passive tap added_loss_db must be > 0");
                 },
                 [](const ClassicalSpoof& spoof) {
                   if (!(spoof.pulse_rate_hz >= 0.0)) throw ConfigError("spoof pulse rate must be >= 0");
                   if (spoof.timing_error_sigma < 0) throw ConfigError("spoof timing error must be >= 0");
                 },
                 [](const auto&) {},
             },
             kind);
}

AttackSchedule::AttackSchedule(std::vector<AttackPlan> plans) : plans_(std::move(plans)) {
  for (const auto& p : plans_) p.validate();
  std::sort(plans_.begin(), plans_.end(),
            [](const AttackPlan& a, const AttackPlan& b) { return a.start_window < b.start_window; });
  for (std::size_t i = 1; i < plans_.size(); ++i) {
    if (plans_[i].start_window <= plans_[i - 1].end_window) {
      throw ConfigError("attack plans overlap at window " + std::to_string(plans_[i].start_window));
    }
  }
}

const AttackPlan* AttackSchedule::in_force(std::int64_t window) const noexcept {
  auto it = std::upper_bound(plans_.begin(), plans_.end(), window,
                             [](std::int64_t w, const AttackPlan& p) { return w < p.start_window; });
  if (it == plans_.begin()) return nullptr;
  --it;
  return it->covers(window) ? &*it : nullptr;
}

const AttackPlan* attack_in_force(std::span<const AttackPlan> plans, std::int64_t window) {
  const AttackPlan* found = nullptr;
  for (const auto& p : plans) {
    if (!p.covers(window)) continue;
    if (found != nullptr) throw ConfigError("overlapping attack plans cover window " + std::to_string(window));
    found = &p;
  }
  return found;
}

optics::JointPhotonState transform_state(const AttackKind& kind, optics::JointPhotonState state) {
  return std::visit(
      overloaded{
          [&](const InterceptResend&) { return optics::apply_decoherence(state, 0.0); },
          [&](const PassiveTap&) { return state; },
          [&](const auto&) {
            // Cut or spoofed: the active mode holds no entangled partner.
            if (state.is_entangled()) return optics::JointPhotonState::replica(state.pump_frequency);
            return state;
          },
      },
      kind);
}

FiberChannel transform_channel(const AttackKind& kind, FiberChannel channel) {
  if (const auto* tap = std::get_if<PassiveTap>(&kind)) channel.loss_db += tap->added_loss_db;
  return channel;
}

const char* kind_name(const AttackKind& kind) noexcept {
  return std::visit(overloaded{
                        [](const InterceptResend&) { return "intercept_resend"; },
                        [](const PassiveTap&) { return "passive_tap"; },
                        [](const CutFiber&) { return "cut_fiber"; },
                        [](const ClassicalSpoof&) { return "classical_spoof"; },
                    },
                    kind);
}

}  // namespace qseal::adversary
