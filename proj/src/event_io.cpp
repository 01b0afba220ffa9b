#include "qseal/event_io.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "qseal/errors.hpp"
#include "qseal/pipeline.hpp"

namespace qseal::io {

using nlohmann::json;
using nlohmann::ordered_json;

std::int64_t phase_to_mrad(double phase) noexcept { return std::llround(phase * 1000.0); }

namespace {

const char* receiver_name(ReceiverId rx) noexcept { return rx == ReceiverId::Active ? "active" : "reference"; }

void write_event(std::ostream& out, const DetectionEvent& e, bool include_origin) {
  ordered_json j;
  j["window"] = e.window_index;
  j["receiver"] = receiver_name(e.receiver);
  j["time_tag_ps"] = e.time_tag;
  j["phase_mrad"] = phase_to_mrad(e.phase_applied);
  if (include_origin) j["origin"] = e.origin == Origin::Photon ? "photon" : "dark";
  out << j.dump() << '\n';
}

template <class T>
T field(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end()) throw IoError("line " + std::to_string(line) + ": missing '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw IoError("line " + std::to_string(line) + ": bad value for '" + key + "'");
  }
}

}  // namespace

void write_event_log(std::ostream& out, const EventStreams& streams, bool include_origin) {
  std::size_t i = 0;
  std::size_t j = 0;
  const auto& a = streams.active;
  const auto& r = streams.reference;
  while (i < a.size() || j < r.size()) {
    if (j == r.size() || (i < a.size() && a[i].time_tag <= r[j].time_tag)) {
      write_event(out, a[i++], include_origin);
    } else {
      write_event(out, r[j++], include_origin);
    }
  }
  if (!out) throw IoError("failed writing event log");
}

EventStreams read_event_log(std::istream& in, const LinkSetup& setup) {
  EventStreams streams;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty()) continue;
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error&) {
      throw IoError("line " + std::to_string(line) + ": not valid JSON");
    }
    DetectionEvent e;
    e.window_index = field<std::int64_t>(j, "window", line);
    e.time_tag = field<TimePs>(j, "time_tag_ps", line);
    const auto rx = field<std::string>(j, "receiver", line);
    if (rx == "active") {
      e.receiver = ReceiverId::Active;
    } else if (rx == "reference") {
      e.receiver = ReceiverId::Reference;
    } else {
      throw IoError("line " + std::to_string(line) + ": unknown receiver '" + rx + "'");
    }
    const auto mrad = field<std::int64_t>(j, "phase_mrad", line);
    bool snapped = false;
    for (double p : setup.receiver(e.receiver).phase_set) {
      if (phase_to_mrad(p) == mrad) {
        e.phase_applied = p;
        snapped = true;
        break;
      }
    }
    if (!snapped) throw IoError("line " + std::to_string(line) + ": phase not in the receiver's phase set");
    if (auto it = j.find("origin"); it != j.end() && it->is_string()) {
      e.origin = it->get<std::string>() == "dark" ? Origin::DarkCount : Origin::Photon;
    }
    streams.of(e.receiver).push_back(e);
  }
  if (in.bad()) throw IoError("failed reading event log");
  sort_stream(streams.active);
  sort_stream(streams.reference);
  return streams;
}

void write_reports(std::ostream& out, std::span<const network::LinkHealthReport> reports) {
  for (const auto& r : reports) {
    ordered_json j;
    j["timestamp"] = r.timestamp;
    j["link_id"] = r.link_id;
    j["state"] = to_string(r.state);
    j["v_hat"] = r.v_hat ? ordered_json(*r.v_hat) : ordered_json(nullptr);
    j["std_err"] = r.std_err ? ordered_json(*r.std_err) : ordered_json(nullptr);
    j["n_central"] = r.n_central;
    j["first_window"] = r.first_window;
    j["last_window"] = r.last_window;
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("failed writing report stream");
}

std::vector<network::LinkHealthReport> read_reports(std::istream& in) {
  std::vector<network::LinkHealthReport> reports;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty()) continue;
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error&) {
      throw IoError("line " + std::to_string(line) + ": not valid JSON");
    }
    network::LinkHealthReport r;
    r.timestamp = field<std::int64_t>(j, "timestamp", line);
    r.link_id = field<std::string>(j, "link_id", line);
    const auto state = parse_seal_state(field<std::string>(j, "state", line));
    if (!state) throw IoError("line " + std::to_string(line) + ": unknown seal state");
    r.state = *state;
    if (auto it = j.find("v_hat"); it != j.end() && it->is_number()) r.v_hat = it->get<double>();
    if (auto it = j.find("std_err"); it != j.end() && it->is_number()) r.std_err = it->get<double>();
    r.n_central = field<std::uint64_t>(j, "n_central", line);
    if (j.contains("first_window")) r.first_window = field<std::int64_t>(j, "first_window", line);
    if (j.contains("last_window")) r.last_window = field<std::int64_t>(j, "last_window", line);
    reports.push_back(std::move(r));
  }
  return reports;
}

std::vector<HistogramRow> histogram(std::span<const analytics::CoincidenceRecord> records, TimePs bin_width,
                                    TimePs half_range) {
  if (bin_width <= 0) throw DomainError("histogram bin width must be > 0");
  const TimePs bins_per_side = (half_range + bin_width - 1) / bin_width;
  std::vector<HistogramRow> rows(static_cast<std::size_t>(2 * bins_per_side + 1));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].bin_center = (static_cast<TimePs>(i) - bins_per_side) * bin_width;
  }
  for (const auto& r : records) {
    // Bin k spans [k w - w/2, k w + w/2).
    const TimePs shifted = r.delta_t + bin_width / 2;
    TimePs k = shifted / bin_width;
    if (shifted % bin_width != 0 && shifted < 0) --k;
    if (k < -bins_per_side || k > bins_per_side) continue;
    ++rows[static_cast<std::size_t>(k + bins_per_side)].count;
  }
  return rows;
}

std::vector<HistogramRow> histogram(const EventStreams& streams, const LinkSetup& setup, TimePs bin_width) {
  if (bin_width <= 0) throw DomainError("histogram bin width must be > 0");
  const auto params = match_params(setup);
  const auto matched = analytics::match_coincidences(streams.active, streams.reference, params);
  return histogram(matched.records, bin_width, params.path_delay + 3 * params.coincidence_window);
}

void write_histogram_csv(std::ostream& out, std::span<const HistogramRow> rows) {
  out << "bin_center_ps,count\n";
  for (const auto& r : rows) out << r.bin_center << ',' << r.count << '\n';
  if (!out) throw IoError("failed writing histogram");
}

}  // namespace qseal::io
