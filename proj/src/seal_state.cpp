#include "qseal/seal_state.hpp"

#include <string_view>

namespace qseal {

using analytics::BellVerdict;
using analytics::RateFlag;

const char* to_string(SealState s) noexcept {
  switch (s) {
    case SealState::Normal: return "normal";
    case SealState::Degraded: return "degraded";
    case SealState::Compromised: return "compromised";
    case SealState::Offline: return "offline";
  }
  return "?";
}

std::optional<SealState> parse_seal_state(std::string_view text) noexcept {
  for (auto s : {SealState::Normal, SealState::Degraded, SealState::Compromised, SealState::Offline}) {
    if (text == to_string(s)) return s;
  }
  return std::nullopt;
}

SealState target_state(const std::optional<BellVerdict>& verdict, RateFlag rate) noexcept {
  if (verdict == BellVerdict::Fail) return SealState::Compromised;
  if (!verdict || rate == RateFlag::NoSignal) return SealState::Offline;
  if (*verdict == BellVerdict::Pass && rate == RateFlag::Nominal) return SealState::Normal;
  return SealState::Degraded;
}

SealStatus update_seal_state(const SealStatus& current, const BatchAssessment& batch, unsigned hysteresis) {
  SealStatus next = current;
  next.last_estimate = batch.estimate;
  next.last_verdict = batch.verdict;
  next.last_rate = batch.rate;

  const SealState target = target_state(batch.verdict, batch.rate);
  auto move_to = [&](SealState s) {
    next.state = s;
    next.since_window = batch.last_window;
    next.pending_target = s;
    next.pending_count = 0;
  };

  if (target == current.state) {
    next.pending_target = current.state;
    next.pending_count = 0;
    return next;
  }
  if (target == SealState::Compromised) {
    move_to(target);
    return next;
  }
  if (current.state == SealState::Compromised && batch.verdict != BellVerdict::Pass) {
    next.pending_target = current.state;
    next.pending_count = 0;
    return next;
  }
  if (current.pending_target == target) {
    ++next.pending_count;
  } else {
    next.pending_target = target;
    next.pending_count = 1;
  }
  if (next.pending_count >= hysteresis) move_to(target);
  return next;
}

}  // namespace qseal
