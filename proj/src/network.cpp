#include "qseal/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

#include "qseal/errors.hpp"

namespace qseal::network {

void NetworkGraph::add_node(std::string id) {
  if (id.empty()) throw ConfigError("node id must not be empty");
  if (has_node(id)) throw ConfigError("duplicate node '" + id + "'");
  nodes_.push_back(std::move(id));
}

void NetworkGraph::add_link(std::string id, std::string a, std::string b, double cost, bool sealed,
                            SealState initial) {
  if (!has_node(a) || !has_node(b)) throw ConfigError("link '" + id + "' references an unknown node");
  if (a == b) throw ConfigError("link '" + id + "' is a self loop");
  if (!(cost > 0.0) || !std::isfinite(cost)) throw ConfigError("link '" + id + "' must have a positive cost");
  if (find_link(id) != nullptr) throw ConfigError("duplicate link id '" + id + "'");
  for (const auto& l : links_) {
    if ((l.a == a && l.b == b) || (l.a == b && l.b == a)) {
      throw ConfigError("parallel links between " + a + " and " + b);
    }
  }
  Link link{std::move(id), std::move(a), std::move(b), cost, sealed, std::nullopt, std::nullopt};
  if (sealed) link.status = initial;
  links_.push_back(std::move(link));
}

bool NetworkGraph::has_node(std::string_view id) const noexcept {
  return std::find(nodes_.begin(), nodes_.end(), id) != nodes_.end();
}

const Link* NetworkGraph::find_link(std::string_view id) const noexcept {
  auto it = std::find_if(links_.begin(), links_.end(), [&](const Link& l) { return l.id == id; });
  return it == links_.end() ? nullptr : &*it;
}

const Link& NetworkGraph::link(std::string_view id) const {
  const Link* l = find_link(id);
  if (l == nullptr) throw PreconditionError("no link '" + std::string(id) + "'");
  return *l;
}

IngestOutcome NetworkGraph::ingest_report(const LinkHealthReport& report) {
  auto it = std::find_if(links_.begin(), links_.end(), [&](const Link& l) { return l.id == report.link_id; });
  if (it == links_.end()) {
    audit_.push_back({report.timestamp, report.link_id, "unknown_link", "no such link"});
    throw ReportRejected("report for unknown link '" + report.link_id + "'");
  }
  if (!it->sealed) {
    audit_.push_back({report.timestamp, report.link_id, "unmonitored", "link carries no seal"});
    throw ReportRejected("report for unmonitored link '" + report.link_id + "'");
  }
  if (it->last_report) {
    if (*it->last_report == report) return IngestOutcome::Duplicate;
    if (report.timestamp <= it->last_report->timestamp) {
      audit_.push_back({report.timestamp, report.link_id, "stale",
                        "last accepted timestamp " + std::to_string(it->last_report->timestamp)});
      return IngestOutcome::RejectedStale;
    }
  }
  const SealState before = *it->status;
  it->status = report.state;
  it->last_report = report;
  audit_.push_back({report.timestamp, report.link_id, "applied",
                    std::string(to_string(before)) + " -> " + to_string(report.state)});
  return IngestOutcome::Applied;
}

void RoutingPolicy::validate() const {
  if (mode == RoutingMode::CostPenalty && !(penalty_factor > 1.0)) {
    throw ConfigError("cost penalty factor must exceed 1");
  }
}

std::optional<double> effective_cost(const Link& link, const RoutingPolicy& policy) noexcept {
  switch (policy.mode) {
    case RoutingMode::RequireNormalSeals:
      if (!link.sealed || link.status != SealState::Normal) return std::nullopt;
      return link.cost;
    case RoutingMode::AvoidCompromised:
      if (link.sealed && link.status == SealState::Compromised) return std::nullopt;
      return link.cost;
    case RoutingMode::CostPenalty:
      if (link.sealed && link.status != SealState::Normal) return link.cost * policy.penalty_factor;
      return link.cost;
  }
  return std::nullopt;
}

std::optional<Path> route(const NetworkGraph& graph, std::string_view src, std::string_view dst,
                          const RoutingPolicy& policy) {
  policy.validate();
  if (!graph.has_node(src) || !graph.has_node(dst)) throw PreconditionError("route endpoints must be graph nodes");
  if (src == dst) return Path{std::string(src)};

  struct Edge {
    std::string to;
    double cost;
  };
  std::map<std::string, std::vector<Edge>, std::less<>> adjacency;
  for (const auto& n : graph.nodes()) adjacency[n];
  for (const auto& l : graph.links()) {
    if (auto c = effective_cost(l, policy)) {
      adjacency[l.a].push_back({l.b, *c});
      adjacency[l.b].push_back({l.a, *c});
    }
  }

  // Distances to dst, so the forward walk from src can pick among all
  // shortest continuations.
  const double inf = std::numeric_limits<double>::infinity();
  std::map<std::string, double, std::less<>> dist;
  for (const auto& n : graph.nodes()) dist[n] = inf;
  using Item = std::pair<double, std::string>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> frontier;
  dist[std::string(dst)] = 0.0;
  frontier.emplace(0.0, std::string(dst));
  while (!frontier.empty()) {
    auto [d, u] = frontier.top();
    frontier.pop();
    if (d > dist[u]) continue;
    for (const auto& e : adjacency[u]) {
      const double nd = d + e.cost;
      if (nd < dist[e.to]) {
        dist[e.to] = nd;
        frontier.emplace(nd, e.to);
      }
    }
  }
  const auto src_it = dist.find(src);
  if (src_it->second == inf) return std::nullopt;

  Path path{std::string(src)};
  std::string u(src);
  while (u != dst) {
    const double du = dist[u];
    const double tol = 1e-9 * std::max(1.0, du);
    const std::string* next = nullptr;
    for (const auto& e : adjacency[u]) {
      if (std::abs(e.cost + dist[e.to] - du) <= tol && (next == nullptr || e.to < *next)) next = &e.to;
    }
    u = *next;
    path.push_back(u);
  }
  return path;
}

Gate gate_transmission(SealState status) noexcept {
  return status == SealState::Normal ? Gate::Allow : Gate::Block;
}

CryptoRequirement escalate_policy(SealState status) noexcept {
  switch (status) {
    case SealState::Normal: return CryptoRequirement::Standard;
    case SealState::Degraded: return CryptoRequirement::EnhancedEncryptionRequired;
    case SealState::Compromised:
    case SealState::Offline: return CryptoRequirement::SuspendTraffic;
  }
  return CryptoRequirement::SuspendTraffic;
}

const char* to_string(Gate g) noexcept { return g == Gate::Allow ? "allow" : "block"; }

const char* to_string(CryptoRequirement c) noexcept {
  switch (c) {
    case CryptoRequirement::Standard: return "standard";
    case CryptoRequirement::EnhancedEncryptionRequired: return "enhanced_encryption_required";
    case CryptoRequirement::SuspendTraffic: return "suspend_traffic";
  }
  return "?";
}

const char* to_string(RoutingMode m) noexcept {
  switch (m) {
    case RoutingMode::RequireNormalSeals: return "require_normal_seals";
    case RoutingMode::AvoidCompromised: return "avoid_compromised";
    case RoutingMode::CostPenalty: return "cost_penalty";
  }
  return "?";
}

std::optional<RoutingMode> parse_routing_mode(std::string_view text) noexcept {
  for (auto m : {RoutingMode::RequireNormalSeals, RoutingMode::AvoidCompromised, RoutingMode::CostPenalty}) {
    if (text == to_string(m)) return m;
  }
  return std::nullopt;
}

}  // namespace qseal::network
