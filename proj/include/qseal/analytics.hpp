#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qseal/components.hpp"

namespace qseal::analytics {

/// 1/sqrt(2) rounded to five decimals: the largest visibility local
/// realism allows.
inline constexpr double kBellThreshold = 0.70711;
inline constexpr double kDefaultAlpha = 0.001;
inline constexpr std::uint64_t kDefaultMinCentralCounts = 100;

enum class PeakClass : std::uint8_t { Central, EarlySide, LateSide, Outside };

struct CoincidenceRecord {
  std::int64_t window_index = 0;
  TimePs delta_t = 0;  ///< active minus reference, after delay compensation
  PeakClass peak_class = PeakClass::Outside;
  double phase_sum = 0.0;  ///< phi_active + phi_reference reduced to [0, 2pi)

  friend bool operator==(const CoincidenceRecord&, const CoincidenceRecord&) = default;
};

struct MatchParams {
  TimePs coincidence_window = 100;  ///< tau_c
  TimePs path_delay = 1'000;        ///< interferometer Delta T
  TimePs delay_offset = 0;          ///< active fiber delay minus reference fiber delay
};

struct MatchResult {
  std::vector<CoincidenceRecord> records;
  /// Windows with more than one click on some receiver, where greedy pairing
  /// had a choice to make.
  std::uint64_t ambiguous_windows = 0;
};

/// Central within tau_c of 0, EarlySide within tau_c of -Delta T, LateSide
/// within tau_c of +Delta T, Outside otherwise. Requires Delta T > 3 tau_c.
PeakClass classify_peak(TimePs delta_t, TimePs path_delay, TimePs tau_c);

/// Greedy nearest-neighbour pairing of clicks from the same window. Each
/// event is used at most once. Pairs farther apart than Delta T + 3 tau_c are
/// kept but classed Outside. Throws PreconditionError if a stream is not
/// sorted by time tag or tau_c <= 0.
MatchResult match_coincidences(std::span<const DetectionEvent> active, std::span<const DetectionEvent> reference,
                               const MatchParams& params);

/// Index k such that phase_sum ~ k*pi/2, or -1.
int quadrature_index(double phase_sum) noexcept;

/// Central-peak coincidence counts per phase-sum class Phi = k*pi/2.
struct PhaseSumCounts {
  std::array<std::uint64_t, 4> central{};

  std::uint64_t at_zero() const noexcept { return central[0]; }
  std::uint64_t at_pi() const noexcept { return central[2]; }
  PhaseSumCounts& operator+=(const PhaseSumCounts& other) noexcept;
};

PhaseSumCounts tally_central(std::span<const CoincidenceRecord> records);

struct VisibilityEstimate {
  double v_hat = 0.0;
  double std_err = 0.0;
  std::uint64_t n_central = 0;  ///< C_0 + C_pi, the counts behind v_hat
  std::int64_t first_window = 0;
  std::int64_t last_window = 0;
  PhaseSumCounts counts{};
  /// C_{pi/2} and C_{3pi/2} each within 4 sigma of (C_0 + C_pi)/2.
  bool quadrature_consistent = true;
};

/// v_hat = (C_0 - C_pi)/(C_0 + C_pi) with first-order Poisson error
/// 2 sqrt(C_0 C_pi)/(C_0 + C_pi)^{3/2}; a zero count is replaced by 1 in the
/// error term. Throws InsufficientDataError below `min_counts`.
VisibilityEstimate estimate_visibility(const PhaseSumCounts& counts, std::int64_t first_window,
                                       std::int64_t last_window,
                                       std::uint64_t min_counts = kDefaultMinCentralCounts);

enum class BellVerdict : std::uint8_t { Pass, Fail, Inconclusive };

/// One-sided test at level alpha in each direction: Fail when the upper
/// confidence bound is below threshold, Pass when the lower bound is above.
BellVerdict bell_threshold_test(const VisibilityEstimate& estimate, double threshold = kBellThreshold,
                                double alpha = kDefaultAlpha);

/// Raw counts seen over a span of windows.
struct ObservedRates {
  std::uint64_t windows = 0;
  std::uint64_t active_singles = 0;
  std::uint64_t reference_singles = 0;
  std::uint64_t coincidences = 0;  ///< records in any of the three peaks
};

/// Per-window rates learned from an attack-free calibration span.
struct RateBaseline {
  std::uint64_t windows = 0;
  double active_singles = 0.0;
  double reference_singles = 0.0;
  double coincidences = 0.0;
  double dark_active = 0.0;     ///< expected dark clicks per window, from detector specs
  double dark_reference = 0.0;
  double coincidence_acceptance = 0.0;  ///< fraction of a window covered by the three peak gates
  double tolerance = 0.2;
};

enum class RateFlag : std::uint8_t { Nominal, LossAnomaly, NoSignal };

/// Fraction of a window of length `window` covered by the three +-tau_c gates.
double coincidence_acceptance(TimePs tau_c, TimePs window) noexcept;

/// Throws PreconditionError if any learned rate is zero.
RateBaseline learn_baseline(const ObservedRates& calibration, double dark_active, double dark_reference,
                            double coincidence_acceptance, double tolerance = 0.2);

/// NoSignal when coincidences do not exceed the accidental floor by 4 sigma.
/// LossAnomaly when a dark-subtracted rate departs from baseline by more
/// than the tolerance and by more than 4 sigma. Nominal otherwise. Throws
/// PreconditionError without a baseline.
RateFlag rate_monitor(const ObservedRates& observed, const std::optional<RateBaseline>& baseline);

const char* to_string(PeakClass c) noexcept;
const char* to_string(BellVerdict v) noexcept;
const char* to_string(RateFlag f) noexcept;

}  // namespace qseal::analytics
