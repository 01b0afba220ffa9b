#pragma once

// The cyber side of the seal: link health ingestion, transmission gating,
// seal-aware routing and cryptographic escalation.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qseal/seal_state.hpp"

namespace qseal::network {

struct LinkHealthReport {
  std::string link_id;
  SealState state = SealState::Offline;
  std::optional<double> v_hat;
  std::optional<double> std_err;
  std::uint64_t n_central = 0;
  std::int64_t first_window = 0;
  std::int64_t last_window = 0;
  std::int64_t timestamp = 0;  ///< ps, end of the batch

  friend bool operator==(const LinkHealthReport&, const LinkHealthReport&) = default;
};

struct Link {
  std::string id;
  std::string a;
  std::string b;
  double cost = 1.0;
  bool sealed = false;
  std::optional<SealState> status;  ///< empty for unmonitored links
  std::optional<LinkHealthReport> last_report;

  const std::string& other_end(const std::string& node) const noexcept { return node == a ? b : a; }
};

/// Report addressed to a link that does not exist or carries no seal.
class ReportRejected : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class IngestOutcome : std::uint8_t { Applied, Duplicate, RejectedStale };

struct AuditEntry {
  std::int64_t timestamp = 0;
  std::string link_id;
  std::string action;  ///< applied, stale, unknown_link, unmonitored
  std::string detail;
};

/// Undirected simple graph with positive link costs. Single writer: reports
/// are applied one at a time; readers take const references.
class NetworkGraph {
 public:
  void add_node(std::string id);
  /// Throws ConfigError for unknown endpoints, self loops, parallel links,
  /// duplicate ids or cost <= 0.
  void add_link(std::string id, std::string a, std::string b, double cost, bool sealed,
                SealState initial = SealState::Normal);

  bool has_node(std::string_view id) const noexcept;
  const Link* find_link(std::string_view id) const noexcept;
  const Link& link(std::string_view id) const;
  const std::vector<std::string>& nodes() const noexcept { return nodes_; }
  std::span<const Link> links() const noexcept { return links_; }

  /// Replaces the link's seal status. Older (or same-time but different)
  /// reports are rejected with an audit entry; an identical repeat is a
  /// no-op. Throws ReportRejected for unknown or unmonitored links.
  IngestOutcome ingest_report(const LinkHealthReport& report);

  std::span<const AuditEntry> audit_log() const noexcept { return audit_; }

 private:
  std::vector<std::string> nodes_;
  std::vector<Link> links_;
  std::vector<AuditEntry> audit_;
};

enum class RoutingMode : std::uint8_t { RequireNormalSeals, AvoidCompromised, CostPenalty };

struct RoutingPolicy {
  RoutingMode mode = RoutingMode::AvoidCompromised;
  double penalty_factor = 10.0;  ///< CostPenalty only; must exceed 1

  void validate() const;
};

/// Cost of traversing `link` under `policy`, or empty if the policy forbids it.
std::optional<double> effective_cost(const Link& link, const RoutingPolicy& policy) noexcept;

using Path = std::vector<std::string>;

/// Cheapest admissible path, ties broken by lexicographically smallest node
/// sequence. Empty optional means no admissible route.
std::optional<Path> route(const NetworkGraph& graph, std::string_view src, std::string_view dst,
                          const RoutingPolicy& policy);

enum class Gate : std::uint8_t { Allow, Block };

/// Traffic rides the sealed fiber only while the seal reads Normal.
Gate gate_transmission(SealState status) noexcept;

enum class CryptoRequirement : std::uint8_t { Standard, EnhancedEncryptionRequired, SuspendTraffic };

CryptoRequirement escalate_policy(SealState status) noexcept;

const char* to_string(Gate g) noexcept;
const char* to_string(CryptoRequirement c) noexcept;
const char* to_string(RoutingMode m) noexcept;
std::optional<RoutingMode> parse_routing_mode(std::string_view text) noexcept;

}  // namespace qseal::network
