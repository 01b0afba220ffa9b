#include "qseal/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "qseal/errors.hpp"

namespace qseal::scenario {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Reads one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + " must be an object");
  }

  template <class T>
  T get(const char* key, T fallback) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return fallback;
    return convert<T>(*it, key);
  }

  template <class T>
  T require(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) throw ConfigError(path_ + "." + key + " is required");
    return convert<T>(*it, key);
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string path(const char* key) const { return path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key())) throw ConfigError("unknown key " + path_ + "." + it.key());
    }
  }

 private:
  template <class T>
  T convert(const json& v, const char* key) const {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(path_ + "." + key + " must be a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(path_ + "." + key + " must be an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
          throw ConfigError(path_ + "." + key + " must be non-negative");
        }
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(path_ + "." + key + " must be a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(path_ + "." + key + " must be a string");
    }
    return v.get<T>();
  }

  const json& j_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

SealState parse_state_or_throw(const std::string& text, const std::string& where) {
  auto s = parse_seal_state(text);
  if (!s) throw ConfigError(where + ": unknown seal state '" + text + "'");
  return *s;
}

void read_channel(const json* j, FiberChannel& ch, const std::string& path) {
  if (j == nullptr) return;
  ObjectReader r(*j, path);
  ch.loss_db = r.get("loss_db", ch.loss_db);
  ch.propagation_delay = r.get("delay_ps", ch.propagation_delay);
  ch.decoherence_factor = r.get("decoherence", ch.decoherence_factor);
  r.finish();
}

void read_receiver(const json* j, MziReceiver& rx, const std::string& path) {
  if (j == nullptr) return;
  ObjectReader r(*j, path);
  rx.path_delay = r.get("path_delay_ps", rx.path_delay);
  if (const json* phases = r.child("phase_set_pi")) {
    if (!phases->is_array()) throw ConfigError(path + ".phase_set_pi must be an array");
    rx.phase_set.clear();
    for (const auto& p : *phases) {
      if (!p.is_number()) throw ConfigError(path + ".phase_set_pi entries must be numbers");
      rx.phase_set.push_back(p.get<double>() * optics::kPi);
    }
  }
  if (const json* det = r.child("detector")) {
    ObjectReader d(*det, path + ".detector");
    rx.detector.efficiency = d.get("efficiency", rx.detector.efficiency);
    rx.detector.dark_rate_hz = d.get("dark_rate_hz", rx.detector.dark_rate_hz);
    rx.detector.jitter_sigma = d.get("jitter_ps", rx.detector.jitter_sigma);
    d.finish();
  }
  r.finish();
}

adversary::AttackPlan read_attack(const json& j, const std::string& path, std::int64_t total_windows) {
  ObjectReader r(j, path);
  adversary::AttackPlan plan;
  const auto kind = r.require<std::string>("kind");
  plan.start_window = r.get<std::int64_t>("start_window", 0);
  plan.end_window = r.get<std::int64_t>("end_window", total_windows - 1);
  if (kind == "intercept_resend") {
    plan.kind = adversary::InterceptResend{};
  } else if (kind == "passive_tap") {
    plan.kind = adversary::PassiveTap{r.require<double>("added_loss_db")};
  } else if (kind == "cut_fiber") {
    plan.kind = adversary::CutFiber{};
  } else if (kind == "classical_spoof") {
    plan.kind = adversary::ClassicalSpoof{r.get("pulse_rate_hz", 0.0), r.get<TimePs>("timing_error_ps", 0)};
  } else {
    throw ConfigError(path + ".kind: unknown attack '" + kind + "'");
  }
  r.finish();
  return plan;
}

NetworkConfig read_network(const json& j) {
  ObjectReader r(j, "network");
  NetworkConfig net;
  const json* nodes = r.child("nodes");
  if (nodes == nullptr || !nodes->is_array()) throw ConfigError("network.nodes must be an array of names");
  for (const auto& n : *nodes) {
    if (!n.is_string()) throw ConfigError("network.nodes entries must be strings");
    net.nodes.push_back(n.get<std::string>());
  }
  const json* links = r.child("links");
  if (links == nullptr || !links->is_array()) throw ConfigError("network.links must be an array");
  for (std::size_t i = 0; i < links->size(); ++i) {
    const std::string path = "network.links[" + std::to_string(i) + "]";
    ObjectReader l((*links)[i], path);
    LinkSpec spec;
    spec.a = l.require<std::string>("a");
    spec.b = l.require<std::string>("b");
    spec.id = l.get<std::string>("id", spec.a + "-" + spec.b);
    spec.cost = l.get("cost", spec.cost);
    spec.sealed = l.get("sealed", spec.sealed);
    spec.initial_state = parse_state_or_throw(l.get<std::string>("initial_state", "normal"), path);
    l.finish();
    net.links.push_back(std::move(spec));
  }
  net.seal_link = r.require<std::string>("seal_link");
  if (const json* policy = r.child("policy")) {
    ObjectReader p(*policy, "network.policy");
    const auto mode = p.get<std::string>("mode", to_string(net.policy.mode));
    auto parsed = network::parse_routing_mode(mode);
    if (!parsed) throw ConfigError("network.policy.mode: unknown mode '" + mode + "'");
    net.policy.mode = *parsed;
    net.policy.penalty_factor = p.get("penalty_factor", net.policy.penalty_factor);
    p.finish();
  }
  if (const json* route = r.child("route")) {
    ObjectReader q(*route, "network.route");
    net.route_src = q.require<std::string>("src");
    net.route_dst = q.require<std::string>("dst");
    q.finish();
  }
  r.finish();
  return net;
}

ordered_json estimate_json(const std::optional<analytics::VisibilityEstimate>& est) {
  if (!est) return nullptr;
  ordered_json j;
  j["v_hat"] = est->v_hat;
  j["std_err"] = est->std_err;
  j["n_central"] = est->n_central;
  j["quadrature_consistent"] = est->quadrature_consistent;
  return j;
}

ordered_json counts_json(const analytics::PhaseSumCounts& c) {
  return ordered_json::array({c.central[0], c.central[1], c.central[2], c.central[3]});
}

ordered_json rates_json(const analytics::ObservedRates& r) {
  ordered_json j;
  j["windows"] = r.windows;
  j["active_singles"] = r.active_singles;
  j["reference_singles"] = r.reference_singles;
  j["coincidences"] = r.coincidences;
  return j;
}

}  // namespace

network::NetworkGraph NetworkConfig::build_graph() const {
  network::NetworkGraph g;
  for (const auto& n : nodes) g.add_node(n);
  for (const auto& l : links) g.add_link(l.id, l.a, l.b, l.cost, l.sealed, l.initial_state);
  return g;
}

std::int64_t ScenarioConfig::calibration_windows() const noexcept {
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(analytics.calibration_fraction *
                                                             static_cast<double>(total_windows)));
}

void ScenarioConfig::validate() const {
  if (total_windows < 2) throw ConfigError("total_windows must be >= 2");
  link.validate();
  analytics.validate();
  const adversary::AttackSchedule schedule(attacks);
  const WindowSampler sampler(link);
  for (const auto& plan : schedule.plans()) {
    sampler.prepare(plan);
    if (plan.start_window < calibration_windows()) {
      throw ConfigError("attack plans must start after the calibration span (window " +
                        std::to_string(calibration_windows()) + ")");
    }
  }
  if (calibration_windows() >= total_windows) throw ConfigError("calibration span leaves no windows to evaluate");
  if (output.histogram_bin <= 0) throw ConfigError("output.histogram_bin_ps must be > 0");
  if (network) {
    network->policy.validate();
    const auto graph = network->build_graph();
    const auto* seal = graph.find_link(network->seal_link);
    if (seal == nullptr || !seal->sealed) throw ConfigError("network.seal_link must name a sealed link");
    if (!network->route_src.empty() && (!graph.has_node(network->route_src) || !graph.has_node(network->route_dst))) {
      throw ConfigError("network.route endpoints must be nodes of the graph");
    }
  }
}

ScenarioConfig parse_config(const json& doc) {
  ScenarioConfig cfg;
  ObjectReader root(doc, "config");
  cfg.master_seed = root.get<std::uint64_t>("master_seed", cfg.master_seed);
  cfg.total_windows = root.get<std::int64_t>("total_windows", cfg.total_windows);

  if (const json* t = root.child("timing")) {
    ObjectReader r(*t, "timing");
    cfg.link.window_duration = r.get("window_ps", cfg.link.window_duration);
    cfg.link.coincidence_window = r.get("coincidence_window_ps", cfg.link.coincidence_window);
    r.finish();
  }
  if (const json* s = root.child("source")) {
    ObjectReader r(*s, "source");
    cfg.link.source.mean_pairs_per_window = r.get("mean_pairs_per_window", cfg.link.source.mean_pairs_per_window);
    cfg.link.source.source_visibility = r.get("visibility", cfg.link.source.source_visibility);
    cfg.link.source.pump_frequency = r.get("pump_frequency_rad_s", cfg.link.source.pump_frequency);
    r.finish();
  }
  if (const json* c = root.child("channels")) {
    ObjectReader r(*c, "channels");
    read_channel(r.child("active"), cfg.link.active_channel, "channels.active");
    read_channel(r.child("reference"), cfg.link.reference_channel, "channels.reference");
    r.finish();
  }
  if (const json* rx = root.child("receivers")) {
    ObjectReader r(*rx, "receivers");
    read_receiver(r.child("active"), cfg.link.active_rx, "receivers.active");
    read_receiver(r.child("reference"), cfg.link.reference_rx, "receivers.reference");
    r.finish();
  }
  if (const json* a = root.child("attacks")) {
    if (!a->is_array()) throw ConfigError("attacks must be an array");
    for (std::size_t i = 0; i < a->size(); ++i) {
      cfg.attacks.push_back(read_attack((*a)[i], "attacks[" + std::to_string(i) + "]", cfg.total_windows));
    }
  }
  if (const json* an = root.child("analytics")) {
    ObjectReader r(*an, "analytics");
    auto& a = cfg.analytics;
    a.batch_windows = r.get("batch_windows", a.batch_windows);
    a.alpha = r.get("alpha", a.alpha);
    a.threshold = r.get("threshold", a.threshold);
    a.hysteresis = r.get("hysteresis", a.hysteresis);
    a.min_central_counts = r.get("min_central_counts", a.min_central_counts);
    a.rate_tolerance = r.get("rate_tolerance", a.rate_tolerance);
    a.calibration_fraction = r.get("calibration_fraction", a.calibration_fraction);
    r.finish();
  }
  if (const json* n = root.child("network")) cfg.network = read_network(*n);
  if (const json* o = root.child("output")) {
    ObjectReader r(*o, "output");
    cfg.output.dir = r.get("dir", cfg.output.dir);
    cfg.output.event_log = r.get("event_log", cfg.output.event_log);
    cfg.output.histogram_bin = r.get("histogram_bin_ps", cfg.output.histogram_bin);
    r.finish();
  }
  root.finish();
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

RunResult analyze(const ScenarioConfig& config, EventStreams events) {
  RunResult result;
  result.events = std::move(events);
  result.analysis = analyze_link(config.link, result.events, config.total_windows, config.analytics);
  const std::string link_id = config.network ? config.network->seal_link : std::string("seal");
  result.reports = health_reports(result.analysis, link_id, config.link.window_duration);
  return result;
}

RunResult execute(const ScenarioConfig& config) {
  config.validate();
  const Simulator sim(config.link, adversary::AttackSchedule(config.attacks), config.master_seed);
  return analyze(config, sim.run(0, config.total_windows));
}

ordered_json build_report(const ScenarioConfig& config, const RunResult& result) {
  const auto& an = result.analysis;
  ordered_json report;
  report["master_seed"] = config.master_seed;
  report["total_windows"] = config.total_windows;
  report["calibration_windows"] = an.calibration_windows;

  ordered_json attacks = ordered_json::array();
  for (const auto& p : config.attacks) {
    attacks.push_back({{"kind", adversary::kind_name(p.kind)},
                       {"start_window", p.start_window},
                       {"end_window", p.end_window}});
  }
  report["attacks"] = attacks;

  ordered_json baseline;
  baseline["windows"] = an.baseline.windows;
  baseline["active_singles_per_window"] = an.baseline.active_singles;
  baseline["reference_singles_per_window"] = an.baseline.reference_singles;
  baseline["coincidences_per_window"] = an.baseline.coincidences;
  baseline["dark_active_per_window"] = an.baseline.dark_active;
  baseline["dark_reference_per_window"] = an.baseline.dark_reference;
  baseline["tolerance"] = an.baseline.tolerance;
  report["baseline"] = baseline;

  ordered_json batches = ordered_json::array();
  for (const auto& b : an.batches) {
    ordered_json row;
    row["first_window"] = b.aggregate.first_window;
    row["last_window"] = b.aggregate.last_window;
    row["rates"] = rates_json(b.aggregate.rates);
    row["central_counts"] = counts_json(b.aggregate.counts);
    row["estimate"] = estimate_json(b.assessment.estimate);
    row["verdict"] = b.assessment.verdict ? analytics::to_string(*b.assessment.verdict) : "insufficient_data";
    row["rate_flag"] = analytics::to_string(b.assessment.rate);
    row["state"] = to_string(b.state_after);
    batches.push_back(row);
  }
  report["batches"] = batches;

  ordered_json transitions = ordered_json::array();
  for (const auto& t : an.transitions) {
    transitions.push_back({{"window", t.window}, {"from", to_string(t.from)}, {"to", to_string(t.to)}});
  }
  report["transitions"] = transitions;

  ordered_json pooled;
  pooled["central_counts"] = counts_json(an.pooled_counts);
  try {
    pooled["estimate"] = estimate_json(analytics::estimate_visibility(an.pooled_counts, an.calibration_windows,
                                                                      config.total_windows - 1,
                                                                      config.analytics.min_central_counts));
  } catch (const InsufficientDataError&) {
    pooled["estimate"] = nullptr;
  }
  report["pooled"] = pooled;
  report["ambiguous_windows"] = an.ambiguous_windows;
  report["final_state"] = to_string(an.final_status.state);
  report["gate"] = network::to_string(network::gate_transmission(an.final_status.state));
  report["crypto_requirement"] = network::to_string(network::escalate_policy(an.final_status.state));
  return report;
}

RouteDemo route_demo(const ScenarioConfig& config, const RunResult& result, const std::string& src,
                     const std::string& dst) {
  if (!config.network) throw ConfigError("route-demo needs a network block");
  auto graph = config.network->build_graph();
  if (!graph.has_node(src) || !graph.has_node(dst)) throw ConfigError("route endpoints must be graph nodes");
  RouteDemo demo;
  demo.src = src;
  demo.dst = dst;
  demo.before = network::route(graph, src, dst, config.network->policy);
  for (const auto& r : result.reports) graph.ingest_report(r);
  demo.after = network::route(graph, src, dst, config.network->policy);
  demo.seal_state = *graph.link(config.network->seal_link).status;
  return demo;
}

std::string format_path(const std::optional<network::Path>& path) {
  if (!path) return "NoRoute";
  std::string out;
  for (std::size_t i = 0; i < path->size(); ++i) {
    if (i > 0) out += " -> ";
    out += (*path)[i];
  }
  return out;
}

OutputFiles write_outputs(const ScenarioConfig& config, const RunResult& result, const std::filesystem::path& dir,
                          bool debug_origins) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot open " + p.string() + " for writing");
    return out;
  };

  OutputFiles files;
  if (config.output.event_log) {
    files.event_log = dir / "events.jsonl";
    auto out = open(files.event_log);
    io::write_event_log(out, result.events, debug_origins);
  }
  {
    files.histogram = dir / "histogram.csv";
    auto out = open(files.histogram);
    io::write_histogram_csv(out, io::histogram(result.events, config.link, config.output.histogram_bin));
  }
  {
    files.report = dir / "report.json";
    auto out = open(files.report);
    out << build_report(config, result).dump(2) << '\n';
    if (!out) throw IoError("failed writing " + files.report.string());
  }
  {
    files.link_reports = dir / "link_reports.jsonl";
    auto out = open(files.link_reports);
    io::write_reports(out, result.reports);
  }
  return files;
}

}  // namespace qseal::scenario
