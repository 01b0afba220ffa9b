// qseal: run quantum-seal scenarios from a JSON config.
//
//   qseal run            --config FILE [--seed N] [--out DIR] [--debug-origins]
//   qseal histogram      --config FILE [--events LOG] [--bin-width PS] [--out DIR]
//   qseal route-demo     --config FILE [--src NODE --dst NODE]
//   qseal validate-config --config FILE
//
// Exit codes: 0 success (seal verdicts are data, not failures), 2 invalid
// configuration, 3 I/O failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qseal/errors.hpp"
#include "qseal/event_io.hpp"
#include "qseal/scenario.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct CommonArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

qseal::scenario::ScenarioConfig load(const CommonArgs& args) {
  auto cfg = qseal::scenario::load_config(args.config);
  if (args.seed) cfg.master_seed = *args.seed;
  return cfg;
}

std::filesystem::path out_dir(const CommonArgs& args, const qseal::scenario::ScenarioConfig& cfg) {
  return args.out.empty() ? std::filesystem::path(cfg.output.dir) : std::filesystem::path(args.out);
}

int cmd_run(const CommonArgs& args, bool debug_origins) {
  const auto cfg = load(args);
  const auto result = qseal::scenario::execute(cfg);
  const auto files = qseal::scenario::write_outputs(cfg, result, out_dir(args, cfg), debug_origins);

  const auto& an = result.analysis;
  std::cout << "windows " << cfg.total_windows << " (calibration " << an.calibration_windows << "), batches "
            << an.batches.size() << "\n";
  for (const auto& t : an.transitions) {
    std::cout << "  window " << t.window << ": " << qseal::to_string(t.from) << " -> " << qseal::to_string(t.to)
              << "\n";
  }
  std::cout << "final seal state: " << qseal::to_string(an.final_status.state) << "\n";
  std::cout << "report: " << files.report.string() << "\n";
  return 0;
}

int cmd_histogram(const CommonArgs& args, const std::string& events_path, std::optional<std::int64_t> bin_width) {
  const auto cfg = load(args);
  const qseal::TimePs width = bin_width.value_or(cfg.output.histogram_bin);
  if (width <= 0) throw qseal::ConfigError("--bin-width must be > 0");

  qseal::EventStreams events;
  if (!events_path.empty()) {
    std::ifstream in(events_path);
    if (!in) throw qseal::IoError("cannot open event log " + events_path);
    events = qseal::io::read_event_log(in, cfg.link);
  } else {
    events = qseal::scenario::execute(cfg).events;
  }
  const auto rows = qseal::io::histogram(events, cfg.link, width);

  const auto dir = out_dir(args, cfg);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw qseal::IoError("cannot create " + dir.string());
  const auto path = dir / "histogram.csv";
  std::ofstream out(path);
  if (!out) throw qseal::IoError("cannot open " + path.string());
  qseal::io::write_histogram_csv(out, rows);
  std::cout << "histogram: " << path.string() << " (" << rows.size() << " bins of " << width << " ps)\n";
  return 0;
}

int cmd_route_demo(const CommonArgs& args, std::string src, std::string dst) {
  const auto cfg = load(args);
  if (!cfg.network) throw qseal::ConfigError("route-demo needs a network block in the config");
  if (src.empty()) src = cfg.network->route_src;
  if (dst.empty()) dst = cfg.network->route_dst;
  if (src.empty() || dst.empty()) throw qseal::ConfigError("route endpoints missing: pass --src/--dst or network.route");

  const auto result = qseal::scenario::execute(cfg);
  const auto demo = qseal::scenario::route_demo(cfg, result, src, dst);
  std::cout << "policy: " << qseal::network::to_string(cfg.network->policy.mode) << "\n";
  std::cout << "before: " << qseal::scenario::format_path(demo.before) << "\n";
  std::cout << "seal link " << cfg.network->seal_link << ": " << qseal::to_string(demo.seal_state) << " (gate "
            << qseal::network::to_string(qseal::network::gate_transmission(demo.seal_state)) << ", crypto "
            << qseal::network::to_string(qseal::network::escalate_policy(demo.seal_state)) << ")\n";
  std::cout << "after:  " << qseal::scenario::format_path(demo.after) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum seal simulator and monitor"};
  app.require_subcommand(1);

  CommonArgs args;
  bool debug_origins = false;
  std::string events_path;
  std::optional<std::int64_t> bin_width;
  std::string src;
  std::string dst;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config, "scenario JSON file")->required();
    sub->add_option("--seed", args.seed, "override master_seed");
    sub->add_option("--out", args.out, "output directory (default: config output.dir)");
  };

  auto* run = app.add_subcommand("run", "simulate, analyze and write event log, histogram and reports");
  add_common(run);
  run->add_flag("--debug-origins", debug_origins, "tag events with photon/dark provenance");

  auto* hist = app.add_subcommand("histogram", "write the coincidence delta-t histogram");
  add_common(hist);
  hist->add_option("--events", events_path, "read events from this log instead of simulating");
  hist->add_option("--bin-width", bin_width, "bin width in ps (default: config output.histogram_bin_ps)");

  auto* demo = app.add_subcommand("route-demo", "show routing before and after the run's seal reports");
  add_common(demo);
  demo->add_option("--src", src, "source node");
  demo->add_option("--dst", dst, "destination node");

  auto* validate = app.add_subcommand("validate-config", "check a scenario file and exit");
  add_common(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(args, debug_origins);
    if (*hist) return cmd_histogram(args, events_path, bin_width);
    if (*demo) return cmd_route_demo(args, src, dst);
    if (*validate) {
      load(args);
      std::cout << "config ok\n";
      return 0;
    }
  } catch (const qseal::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const qseal::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
