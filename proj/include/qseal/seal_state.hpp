#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "qseal/analytics.hpp"

namespace qseal {

enum class SealState : std::uint8_t { Normal, Degraded, Compromised, Offline };

const char* to_string(SealState s) noexcept;
std::optional<SealState> parse_seal_state(std::string_view text) noexcept;

/// Everything one evaluation batch says about the link.
struct BatchAssessment {
  std::optional<analytics::VisibilityEstimate> estimate;  ///< empty below the count floor
  std::optional<analytics::BellVerdict> verdict;          ///< empty below the count floor
  analytics::RateFlag rate = analytics::RateFlag::NoSignal;
  std::int64_t first_window = 0;
  std::int64_t last_window = 0;
};

struct SealStatus {
  SealState state = SealState::Offline;
  std::int64_t since_window = 0;
  std::optional<analytics::VisibilityEstimate> last_estimate;
  std::optional<analytics::BellVerdict> last_verdict;
  analytics::RateFlag last_rate = analytics::RateFlag::NoSignal;
  // Hysteresis memory: the state recent batches keep pointing at.
  SealState pending_target = SealState::Offline;
  unsigned pending_count = 0;
};

/// State a single batch points at, before hysteresis.
SealState target_state(const std::optional<analytics::BellVerdict>& verdict, analytics::RateFlag rate) noexcept;

/// Sequential reducer over batch results. A change takes effect once
/// `hysteresis` consecutive batches point at the same new state, except
/// Compromised, which is entered on the first failing batch. Leaving
/// Compromised takes `hysteresis` consecutive batches that pass the Bell test.
SealStatus update_seal_state(const SealStatus& current, const BatchAssessment& batch, unsigned hysteresis = 3);

}  // namespace qseal
