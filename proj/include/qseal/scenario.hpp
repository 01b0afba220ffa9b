#pragma once

// Scenario files and the end-to-end runner behind the command-line tool.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qseal/adversary.hpp"
#include "qseal/event_io.hpp"
#include "qseal/network.hpp"
#include "qseal/pipeline.hpp"

namespace qseal::scenario {

struct LinkSpec {
  std::string id;
  std::string a;
  std::string b;
  double cost = 1.0;
  bool sealed = false;
  SealState initial_state = SealState::Normal;
};

struct NetworkConfig {
  std::vector<std::string> nodes;
  std::vector<LinkSpec> links;
  std::string seal_link;  ///< the link whose seal this scenario simulates
  network::RoutingPolicy policy{};
  std::string route_src;
  std::string route_dst;

  network::NetworkGraph build_graph() const;
};

struct OutputConfig {
  std::string dir = "out";
  bool event_log = true;
  TimePs histogram_bin = 20;
};

struct ScenarioConfig {
  std::uint64_t master_seed = 1;
  std::int64_t total_windows = 100'000;
  LinkSetup link{};
  std::vector<adversary::AttackPlan> attacks;
  AnalyticsConfig analytics{};
  std::optional<NetworkConfig> network;
  OutputConfig output{};

  /// Every component invariant, plus: attack plans do not overlap each other
  /// or the calibration span, and the network block is self-consistent.
  void validate() const;
  std::int64_t calibration_windows() const noexcept;
};

/// Strict parse: unknown keys and type mismatches raise ConfigError.
/// Omitted keys take the component defaults.
ScenarioConfig parse_config(const nlohmann::json& doc);

/// Throws IoError if the file cannot be read, ConfigError if it is invalid.
ScenarioConfig load_config(const std::filesystem::path& path);

struct RunResult {
  EventStreams events;
  LinkAnalysis analysis;
  std::vector<network::LinkHealthReport> reports;
};

/// Simulate then analyze; no file I/O.
RunResult execute(const ScenarioConfig& config);

/// Analyze an existing event stream (e.g. a parsed event log).
RunResult analyze(const ScenarioConfig& config, EventStreams events);

/// Structured per-batch summary written as report.json.
nlohmann::ordered_json build_report(const ScenarioConfig& config, const RunResult& result);

struct RouteDemo {
  std::string src;
  std::string dst;
  std::optional<network::Path> before;
  std::optional<network::Path> after;
  SealState seal_state = SealState::Offline;
};

/// Route before and after feeding the run's health reports into the graph.
RouteDemo route_demo(const ScenarioConfig& config, const RunResult& result, const std::string& src,
                     const std::string& dst);

std::string format_path(const std::optional<network::Path>& path);

struct OutputFiles {
  std::filesystem::path event_log;
  std::filesystem::path histogram;
  std::filesystem::path report;
  std::filesystem::path link_reports;
};

/// Writes events.jsonl (if enabled), histogram.csv, report.json and
/// link_reports.jsonl into `dir`. Throws IoError.
OutputFiles write_outputs(const ScenarioConfig& config, const RunResult& result, const std::filesystem::path& dir,
                          bool debug_origins);

}  // namespace qseal::scenario
