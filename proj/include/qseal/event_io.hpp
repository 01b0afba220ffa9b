#pragma once

// Line-oriented file formats: the event log (one JSON object per click),
// the link-health report stream (one JSON object per batch report) and the
// delta-t histogram (CSV).

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "qseal/analytics.hpp"
#include "qseal/network.hpp"
#include "qseal/simulator.hpp"

namespace qseal::io {

std::int64_t phase_to_mrad(double phase) noexcept;

/// Writes both streams merged in time order (active first on ties):
///   {"window":12,"receiver":"active","time_tag_ps":12100000,"phase_mrad":1571}
/// `include_origin` adds "origin":"photon"|"dark".
void write_event_log(std::ostream& out, const EventStreams& streams, bool include_origin);

/// Parses an event log. Phases are snapped back to the member of the
/// receiver's phase set with the same milliradian value, so analytics on the
/// parsed log reproduce the in-memory results exactly. Throws IoError on
/// malformed lines or phases outside the set.
EventStreams read_event_log(std::istream& in, const LinkSetup& setup);

void write_reports(std::ostream& out, std::span<const network::LinkHealthReport> reports);
std::vector<network::LinkHealthReport> read_reports(std::istream& in);

struct HistogramRow {
  TimePs bin_center = 0;
  std::uint64_t count = 0;
};

/// Coincidence delta_t counts in bins of `bin_width` centred on multiples
/// of it, covering +-(Delta T + 3 tau_c). Throws DomainError for bin_width <= 0.
std::vector<HistogramRow> histogram(std::span<const analytics::CoincidenceRecord> records, TimePs bin_width,
                                    TimePs half_range);

/// Matches the streams and bins the result over the setup's peak range.
std::vector<HistogramRow> histogram(const EventStreams& streams, const LinkSetup& setup, TimePs bin_width);

/// "bin_center_ps,count" header then one row per bin.
void write_histogram_csv(std::ostream& out, std::span<const HistogramRow> rows);

}  // namespace qseal::io
