#include "qseal/pipeline.hpp"

#include <algorithm>

#include "qseal/errors.hpp"

namespace qseal {

using analytics::BellVerdict;
using analytics::PeakClass;

void AnalyticsConfig::validate() const {
  if (batch_windows <= 0) throw ConfigError("analytics.batch_windows must be > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("analytics.alpha must lie in (0, 1)");
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("analytics.threshold must lie in (0, 1)");
  if (hysteresis == 0) throw ConfigError("analytics.hysteresis must be >= 1");
  if (min_central_counts == 0) throw ConfigError("analytics.min_central_counts must be >= 1");
  if (!(rate_tolerance > 0.0)) throw ConfigError("analytics.rate_tolerance must be > 0");
  if (!(calibration_fraction > 0.0 && calibration_fraction < 1.0)) {
    throw ConfigError("analytics.calibration_fraction must lie in (0, 1)");
  }
}

analytics::MatchParams match_params(const LinkSetup& setup) {
  return {setup.coincidence_window, setup.active_rx.path_delay,
          setup.active_channel.propagation_delay - setup.reference_channel.propagation_delay};
}

std::vector<BatchAggregate> aggregate_batches(const EventStreams& streams, const analytics::MatchResult& matched,
                                              std::int64_t begin, std::int64_t end, std::int64_t batch_windows) {
  if (batch_windows <= 0) throw PreconditionError("batch size must be > 0");
  std::vector<BatchAggregate> batches;
  for (std::int64_t first = begin; first < end; first += batch_windows) {
    BatchAggregate b;
    b.first_window = first;
    b.last_window = std::min(first + batch_windows, end) - 1;
    b.rates.windows = static_cast<std::uint64_t>(b.last_window - first + 1);
    batches.push_back(b);
  }
  auto slot = [&](std::int64_t w) -> BatchAggregate* {
    if (w < begin || w >= end) return nullptr;
    return &batches[static_cast<std::size_t>((w - begin) / batch_windows)];
  };
  for (const auto& e : streams.active) {
    if (auto* b = slot(e.window_index)) ++b->rates.active_singles;
  }
  for (const auto& e : streams.reference) {
    if (auto* b = slot(e.window_index)) ++b->rates.reference_singles;
  }
  for (const auto& r : matched.records) {
    auto* b = slot(r.window_index);
    if (b == nullptr || r.peak_class == PeakClass::Outside) continue;
    ++b->rates.coincidences;
    if (r.peak_class == PeakClass::Central) {
      const int k = analytics::quadrature_index(r.phase_sum);
      if (k >= 0) ++b->counts.central[static_cast<std::size_t>(k)];
    }
  }
  return batches;
}

BatchAggregate aggregate_span(const EventStreams& streams, const analytics::MatchResult& matched,
                              std::int64_t begin, std::int64_t end) {
  if (end <= begin) {
    BatchAggregate empty;
    empty.first_window = begin;
    empty.last_window = begin - 1;
    return empty;
  }
  return aggregate_batches(streams, matched, begin, end, end - begin).front();
}

analytics::RateBaseline learn_link_baseline(const LinkSetup& setup, const analytics::ObservedRates& calibration,
                                            double tolerance) {
  return analytics::learn_baseline(calibration, setup.dark_per_window(ReceiverId::Active),
                                   setup.dark_per_window(ReceiverId::Reference),
                                   analytics::coincidence_acceptance(setup.coincidence_window, setup.window_duration),
                                   tolerance);
}

SealMonitor::SealMonitor(AnalyticsConfig config, analytics::RateBaseline baseline, SealStatus initial)
    : config_(config), baseline_(baseline), status_(initial) {
  config_.validate();
}

BatchResult SealMonitor::evaluate(const BatchAggregate& batch) {
  BatchResult result;
  result.aggregate = batch;
  auto& a = result.assessment;
  a.first_window = batch.first_window;
  a.last_window = batch.last_window;
  try {
    a.estimate = analytics::estimate_visibility(batch.counts, batch.first_window, batch.last_window,
                                                config_.min_central_counts);
    a.verdict = analytics::bell_threshold_test(*a.estimate, config_.threshold, config_.alpha);
  } catch (const InsufficientDataError&) {
    a.estimate.reset();
    a.verdict.reset();
  }
  a.rate = analytics::rate_monitor(batch.rates, baseline_);
  status_ = update_seal_state(status_, a, config_.hysteresis);
  result.state_after = status_.state;
  return result;
}

LinkAnalysis analyze_link(const LinkSetup& setup, const EventStreams& streams, std::int64_t total_windows,
                          const AnalyticsConfig& config) {
  config.validate();
  LinkAnalysis out;
  const auto matched = analytics::match_coincidences(streams.active, streams.reference, match_params(setup));
  out.ambiguous_windows = matched.ambiguous_windows;

  out.calibration_windows =
      std::max<std::int64_t>(1, static_cast<std::int64_t>(config.calibration_fraction * static_cast<double>(total_windows)));
  if (out.calibration_windows >= total_windows) throw ConfigError("calibration span leaves no windows to evaluate");
  out.calibration = aggregate_span(streams, matched, 0, out.calibration_windows);
  try {
    out.baseline = learn_link_baseline(setup, out.calibration.rates, config.rate_tolerance);
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("calibration failed: ") + e.what());
  }

  SealStatus initial;
  initial.since_window = out.calibration_windows;
  SealMonitor monitor(config, out.baseline, initial);
  for (const auto& batch :
       aggregate_batches(streams, matched, out.calibration_windows, total_windows, config.batch_windows)) {
    const SealState before = monitor.status().state;
    out.batches.push_back(monitor.evaluate(batch));
    out.pooled_counts += batch.counts;
    if (monitor.status().state != before) {
      out.transitions.push_back({batch.last_window, before, monitor.status().state});
    }
  }
  out.final_status = monitor.status();
  return out;
}

std::vector<network::LinkHealthReport> health_reports(const LinkAnalysis& analysis, const std::string& link_id,
                                                      TimePs window_duration) {
  std::vector<network::LinkHealthReport> reports;
  reports.reserve(analysis.batches.size());
  for (const auto& b : analysis.batches) {
    network::LinkHealthReport r;
    r.link_id = link_id;
    r.state = b.state_after;
    if (b.assessment.estimate) {
      r.v_hat = b.assessment.estimate->v_hat;
      r.std_err = b.assessment.estimate->std_err;
      r.n_central = b.assessment.estimate->n_central;
    } else {
      r.n_central = b.aggregate.counts.at_zero() + b.aggregate.counts.at_pi();
    }
    r.first_window = b.aggregate.first_window;
    r.last_window = b.aggregate.last_window;
    r.timestamp = (b.aggregate.last_window + 1) * window_duration;
    reports.push_back(std::move(r));
  }
  return reports;
}

}  // namespace qseal
