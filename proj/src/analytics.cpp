#include "qseal/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "qseal/errors.hpp"
#include "qseal/optics.hpp"

namespace qseal::analytics {

PeakClass classify_peak(TimePs delta_t, TimePs path_delay, TimePs tau_c) {
  if (std::llabs(delta_t) <= tau_c) return PeakClass::Central;
  if (std::llabs(delta_t + path_delay) <= tau_c) return PeakClass::EarlySide;
  if (std::llabs(delta_t - path_delay) <= tau_c) return PeakClass::LateSide;
  return PeakClass::Outside;
}

namespace {

bool sorted_by_time(std::span<const DetectionEvent> events) {
  return std::is_sorted(events.begin(), events.end(),
                        [](const DetectionEvent& a, const DetectionEvent& b) { return a.time_tag < b.time_tag; });
}

// Indices of `events` ordered by window, keeping time order inside a window.
std::vector<std::uint32_t> by_window(std::span<const DetectionEvent> events) {
  std::vector<std::uint32_t> idx(events.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::stable_sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
    return events[a].window_index < events[b].window_index;
  });
  return idx;
}

}  // namespace

MatchResult match_coincidences(std::span<const DetectionEvent> active, std::span<const DetectionEvent> reference,
                               const MatchParams& params) {
  if (params.coincidence_window <= 0) throw PreconditionError("coincidence window must be > 0");
  if (!sorted_by_time(active) || !sorted_by_time(reference)) {
    throw PreconditionError("event streams must be sorted by time tag");
  }
  MatchResult result;
  if (active.empty() || reference.empty()) return result;

  const TimePs reach = params.path_delay + 3 * params.coincidence_window;
  const auto ia = by_window(active);
  const auto ir = by_window(reference);

  auto make_record = [&](const DetectionEvent& a, const DetectionEvent& r) {
    CoincidenceRecord rec;
    rec.window_index = a.window_index;
    rec.delta_t = (a.time_tag - params.delay_offset) - r.time_tag;
    rec.peak_class = std::llabs(rec.delta_t) <= reach
                         ? classify_peak(rec.delta_t, params.path_delay, params.coincidence_window)
                         : PeakClass::Outside;
    rec.phase_sum = optics::PhasePair{a.phase_applied, r.phase_applied}.sum();
    return rec;
  };

  struct Candidate {
    TimePs distance;
    std::size_t i;
    std::size_t j;
  };
  std::vector<Candidate> candidates;
  std::vector<CoincidenceRecord> window_records;

  std::size_t pa = 0;
  std::size_t pr = 0;
  while (pa < ia.size() && pr < ir.size()) {
    const std::int64_t wa = active[ia[pa]].window_index;
    const std::int64_t wr = reference[ir[pr]].window_index;
    if (wa < wr) {
      while (pa < ia.size() && active[ia[pa]].window_index == wa) ++pa;
      continue;
    }
    if (wr < wa) {
      while (pr < ir.size() && reference[ir[pr]].window_index == wr) ++pr;
      continue;
    }
    const std::size_t ea = std::find_if(ia.begin() + pa, ia.end(), [&](std::uint32_t k) {
                             return active[k].window_index != wa;
                           }) - ia.begin();
    const std::size_t er = std::find_if(ir.begin() + pr, ir.end(), [&](std::uint32_t k) {
                             return reference[k].window_index != wa;
                           }) - ir.begin();

    if (ea - pa == 1 && er - pr == 1) {
      result.records.push_back(make_record(active[ia[pa]], reference[ir[pr]]));
    } else {
      ++result.ambiguous_windows;
      candidates.clear();
      for (std::size_t i = pa; i < ea; ++i) {
        for (std::size_t j = pr; j < er; ++j) {
          const TimePs dt = (active[ia[i]].time_tag - params.delay_offset) - reference[ir[j]].time_tag;
          candidates.push_back({std::llabs(dt), i, j});
        }
      }
      std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
        if (x.distance != y.distance) return x.distance < y.distance;
        if (x.i != y.i) return x.i < y.i;
        return x.j < y.j;
      });
      std::vector<bool> used_a(ea - pa, false);
      std::vector<bool> used_r(er - pr, false);
      window_records.clear();
      std::vector<std::size_t> owner;
      for (const auto& c : candidates) {
        if (used_a[c.i - pa] || used_r[c.j - pr]) continue;
        used_a[c.i - pa] = true;
        used_r[c.j - pr] = true;
        window_records.push_back(make_record(active[ia[c.i]], reference[ir[c.j]]));
        owner.push_back(c.i);
      }
      // Emit in active-time order so output does not depend on match order.
      std::vector<std::size_t> order(window_records.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return owner[x] < owner[y]; });
      for (std::size_t k : order) result.records.push_back(window_records[k]);
    }
    pa = ea;
    pr = er;
  }
  return result;
}

int quadrature_index(double phase_sum) noexcept {
  const double quarter = 0.5 * optics::kPi;
  const double k = std::round(phase_sum / quarter);
  if (std::abs(phase_sum - k * quarter) > 1e-6) return -1;
  return static_cast<int>(((static_cast<long long>(k) % 4) + 4) % 4);
}

PhaseSumCounts& PhaseSumCounts::operator+=(const PhaseSumCounts& other) noexcept {
  for (std::size_t k = 0; k < central.size(); ++k) central[k] += other.central[k];
  return *this;
}

PhaseSumCounts tally_central(std::span<const CoincidenceRecord> records) {
  PhaseSumCounts counts;
  for (const auto& r : records) {
    if (r.peak_class != PeakClass::Central) continue;
    const int k = quadrature_index(r.phase_sum);
    if (k >= 0) ++counts.central[static_cast<std::size_t>(k)];
  }
  return counts;
}

VisibilityEstimate estimate_visibility(const PhaseSumCounts& counts, std::int64_t first_window,
                                       std::int64_t last_window, std::uint64_t min_counts) {
  const std::uint64_t c0 = counts.at_zero();
  const std::uint64_t cpi = counts.at_pi();
  const std::uint64_t n = c0 + cpi;
  if (n == 0 || n < min_counts) {
    throw InsufficientDataError("only " + std::to_string(n) + " central coincidences at Phi in {0, pi}; need " +
                                std::to_string(min_counts));
  }
  VisibilityEstimate est;
  est.counts = counts;
  est.n_central = n;
  est.first_window = first_window;
  est.last_window = last_window;
  est.v_hat = (static_cast<double>(c0) - static_cast<double>(cpi)) / static_cast<double>(n);
  const double a = c0 == 0 ? 1.0 : static_cast<double>(c0);
  const double b = cpi == 0 ? 1.0 : static_cast<double>(cpi);
  est.std_err = 2.0 * std::sqrt(a * b) / std::pow(a + b, 1.5);

  const double half = 0.5 * static_cast<double>(n);
  const double sigma = std::sqrt(std::max(half, 1.0));
  est.quadrature_consistent = std::abs(static_cast<double>(counts.central[1]) - half) <= 4.0 * sigma &&
                              std::abs(static_cast<double>(counts.central[3]) - half) <= 4.0 * sigma;
  return est;
}

BellVerdict bell_threshold_test(const VisibilityEstimate& estimate, double threshold, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  const double z = boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), 1.0 - alpha);
  if (estimate.v_hat + z * estimate.std_err < threshold) return BellVerdict::Fail;
  if (estimate.v_hat - z * estimate.std_err > threshold) return BellVerdict::Pass;
  return BellVerdict::Inconclusive;
}

double coincidence_acceptance(TimePs tau_c, TimePs window) noexcept {
  return 3.0 * static_cast<double>(2 * tau_c + 1) / static_cast<double>(window);
}

RateBaseline learn_baseline(const ObservedRates& calibration, double dark_active, double dark_reference,
                            double acceptance, double tolerance) {
  if (calibration.windows == 0 || calibration.active_singles == 0 || calibration.reference_singles == 0 ||
      calibration.coincidences == 0) {
    throw PreconditionError("calibration span produced a zero rate; baseline cannot be established");
  }
  if (!(tolerance > 0.0)) throw DomainError("rate tolerance must be > 0");
  const double w = static_cast<double>(calibration.windows);
  RateBaseline b;
  b.windows = calibration.windows;
  b.active_singles = static_cast<double>(calibration.active_singles) / w;
  b.reference_singles = static_cast<double>(calibration.reference_singles) / w;
  b.coincidences = static_cast<double>(calibration.coincidences) / w;
  b.dark_active = dark_active;
  b.dark_reference = dark_reference;
  b.coincidence_acceptance = acceptance;
  b.tolerance = tolerance;
  return b;
}

namespace {

// True when `observed` departs from the baseline expectation by more than
// the relative tolerance on the dark-subtracted signal, and by 4 sigma.
bool rate_anomalous(std::uint64_t observed, double base_rate, double dark_rate, std::uint64_t windows,
                    std::uint64_t baseline_windows, double tolerance) {
  const double n = static_cast<double>(windows);
  const double expected_signal = std::max((base_rate - dark_rate) * n, 1e-12);
  const double observed_signal = static_cast<double>(observed) - dark_rate * n;
  const double diff = std::abs(observed_signal - expected_signal);
  const double var = static_cast<double>(observed) + base_rate * n * n / static_cast<double>(baseline_windows);
  return diff > tolerance * expected_signal && diff > 4.0 * std::sqrt(var);
}

}  // namespace

RateFlag rate_monitor(const ObservedRates& observed, const std::optional<RateBaseline>& baseline) {
  if (!baseline) throw PreconditionError("rate_monitor needs a calibrated baseline");
  if (observed.windows == 0) return RateFlag::NoSignal;
  const double n = static_cast<double>(observed.windows);
  const double sa = static_cast<double>(observed.active_singles) / n;
  const double sr = static_cast<double>(observed.reference_singles) / n;
  const double floor = n * sa * sr * baseline->coincidence_acceptance;
  if (static_cast<double>(observed.coincidences) <= floor + 4.0 * std::sqrt(floor)) return RateFlag::NoSignal;

  const auto& b = *baseline;
  if (rate_anomalous(observed.active_singles, b.active_singles, b.dark_active, observed.windows, b.windows,
                     b.tolerance) ||
      rate_anomalous(observed.reference_singles, b.reference_singles, b.dark_reference, observed.windows, b.windows,
                     b.tolerance) ||
      rate_anomalous(observed.coincidences, b.coincidences, 0.0, observed.windows, b.windows, b.tolerance)) {
    return RateFlag::LossAnomaly;
  }
  return RateFlag::Nominal;
}

const char* to_string(PeakClass c) noexcept {
  switch (c) {
    case PeakClass::Central: return "central";
    case PeakClass::EarlySide: return "early_side";
    case PeakClass::LateSide: return "late_side";
    case PeakClass::Outside: return "outside";
  }
  return "?";
}

const char* to_string(BellVerdict v) noexcept {
  switch (v) {
    case BellVerdict::Pass: return "pass";
    case BellVerdict::Fail: return "fail";
    case BellVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

const char* to_string(RateFlag f) noexcept {
  switch (f) {
    case RateFlag::Nominal: return "nominal";
    case RateFlag::LossAnomaly: return "loss_anomaly";
    case RateFlag::NoSignal: return "no_signal";
  }
  return "?";
}

}  // namespace qseal::analytics
