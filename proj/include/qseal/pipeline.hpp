#pragma once

// Batch-wise seal monitoring over simulated (or replayed) event streams:
// calibrate a rate baseline, then evaluate fixed-size window batches through
// coincidence matching, visibility estimation, the Bell test, the rate
// monitor and the seal state machine.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qseal/analytics.hpp"
#include "qseal/network.hpp"
#include "qseal/seal_state.hpp"
#include "qseal/simulator.hpp"

namespace qseal {

struct AnalyticsConfig {
  std::int64_t batch_windows = 10'000;
  double alpha = analytics::kDefaultAlpha;
  double threshold = analytics::kBellThreshold;
  unsigned hysteresis = 3;
  std::uint64_t min_central_counts = analytics::kDefaultMinCentralCounts;
  double rate_tolerance = 0.2;
  double calibration_fraction = 0.1;

  void validate() const;
};

analytics::MatchParams match_params(const LinkSetup& setup);

/// Counts accumulated over windows [first_window, last_window].
struct BatchAggregate {
  std::int64_t first_window = 0;
  std::int64_t last_window = 0;
  analytics::ObservedRates rates;
  analytics::PhaseSumCounts counts;
};

/// Aggregates `streams` and their coincidence records over consecutive
/// batches covering [begin, end). The last batch may be short.
std::vector<BatchAggregate> aggregate_batches(const EventStreams& streams, const analytics::MatchResult& matched,
                                              std::int64_t begin, std::int64_t end, std::int64_t batch_windows);

BatchAggregate aggregate_span(const EventStreams& streams, const analytics::MatchResult& matched,
                              std::int64_t begin, std::int64_t end);

/// Baseline from an attack-free span, with dark floors taken from the
/// detector specs.
analytics::RateBaseline learn_link_baseline(const LinkSetup& setup, const analytics::ObservedRates& calibration,
                                            double tolerance);

struct BatchResult {
  BatchAggregate aggregate;
  BatchAssessment assessment;
  SealState state_after = SealState::Offline;
};

/// Single-writer reducer: feed batches in window order.
class SealMonitor {
 public:
  SealMonitor(AnalyticsConfig config, analytics::RateBaseline baseline, SealStatus initial = {});

  BatchResult evaluate(const BatchAggregate& batch);

  const SealStatus& status() const noexcept { return status_; }
  const analytics::RateBaseline& baseline() const noexcept { return baseline_; }

 private:
  AnalyticsConfig config_;
  analytics::RateBaseline baseline_;
  SealStatus status_;
};

struct StateTransition {
  std::int64_t window = 0;
  SealState from = SealState::Offline;
  SealState to = SealState::Offline;
};

struct LinkAnalysis {
  std::int64_t calibration_windows = 0;
  BatchAggregate calibration;
  analytics::RateBaseline baseline;
  std::vector<BatchResult> batches;
  std::vector<StateTransition> transitions;
  SealStatus final_status;
  std::uint64_t ambiguous_windows = 0;
  /// Central counts pooled over every evaluated batch.
  analytics::PhaseSumCounts pooled_counts;
};

/// Full analysis of windows [0, total_windows). The first
/// calibration_fraction of windows teach the baseline; the rest are
/// evaluated in batches. Throws ConfigError if the calibration span cannot
/// yield a baseline.
LinkAnalysis analyze_link(const LinkSetup& setup, const EventStreams& streams, std::int64_t total_windows,
                          const AnalyticsConfig& config);

std::vector<network::LinkHealthReport> health_reports(const LinkAnalysis& analysis, const std::string& link_id,
                                                      TimePs window_duration);

}  // namespace qseal
