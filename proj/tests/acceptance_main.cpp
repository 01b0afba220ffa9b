// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "oracles/amplitude_oracle.hpp"
#include "oracles/path_oracle.hpp"
#include "qseal/analytics.hpp"
#include "qseal/errors.hpp"
#include "qseal/pipeline.hpp"
#include "qseal/scenario.hpp"
#include "qseal/simulator.hpp"

using namespace qseal;
namespace an = qseal::analytics;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

LinkSetup ideal_link(double mu) {
  LinkSetup s;
  s.source.mean_pairs_per_window = mu;
  s.source.source_visibility = 1.0;
  s.active_channel.loss_db = 0.0;
  s.reference_channel.loss_db = 0.0;
  for (auto* rx : {&s.active_rx, &s.reference_rx}) {
    rx->detector.efficiency = 1.0;
    rx->detector.dark_rate_hz = 0.0;
  }
  return s;
}

an::VisibilityEstimate run_estimate(const LinkSetup& s, const adversary::AttackSchedule& attacks, std::uint64_t seed,
                                    std::int64_t windows) {
  const auto ev = Simulator(s, attacks, seed).run(0, windows);
  const auto m = an::match_coincidences(ev.active, ev.reference, match_params(s));
  return an::estimate_visibility(an::tally_central(m.records), 0, windows - 1);
}

// Criterion 1 result feeds criterion 2.
an::VisibilityEstimate g_recovery;

Outcome visibility_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  const LinkSetup s = ideal_link(0.05);
  constexpr std::int64_t kWindows = 2'000'000;  // about 1e5 pair windows at mu = 0.05
  const auto ev = Simulator(s, {}, 1001).run(0, kWindows);
  const auto m = an::match_coincidences(ev.active, ev.reference, match_params(s));
  g_recovery = an::estimate_visibility(an::tally_central(m.records), 0, kWindows - 1);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::int64_t pair_windows = 0;
  for (std::int64_t w = 0; w < kWindows; ++w) {
    SplitMix64 rng = window_stream(1001, w);
    pair_windows += emit_window(s.source, rng).is_entangled();
  }
  const auto& e = g_recovery;
  const bool ok = e.v_hat >= 0.99 && std::abs(e.v_hat - 1.0) <= 3.0 * e.std_err && secs <= 10.0;
  return {ok, fmt("pair_windows=%lld v_hat=%.5f std_err=%.5f n_central=%llu runtime=%.2fs",
                  static_cast<long long>(pair_windows), e.v_hat, e.std_err,
                  static_cast<unsigned long long>(e.n_central), secs)};
}

Outcome bell_decision() {
  const auto v = an::bell_threshold_test(g_recovery, 0.70711, 0.001);
  return {v == an::BellVerdict::Pass,
          fmt("verdict=%s lower_bound=%.5f threshold=0.70711", an::to_string(v), g_recovery.v_hat - 3.0902 * g_recovery.std_err)};
}

Outcome attack_detection() {
  const LinkSetup s;  // realistic defaults
  constexpr std::int64_t kCalibration = 10'000'000;
  constexpr std::int64_t kBatch = 700'000;
  constexpr int kBatches = 1'000;
  const adversary::AttackSchedule attacks(
      {adversary::AttackPlan{adversary::InterceptResend{}, kCalibration, kCalibration + kBatch * kBatches}});
  const Simulator sim(s, attacks, 3003);
  const auto params = match_params(s);

  const auto calib_ev = sim.run(0, kCalibration);
  const auto calib_m = an::match_coincidences(calib_ev.active, calib_ev.reference, params);
  const auto baseline = learn_link_baseline(s, aggregate_span(calib_ev, calib_m, 0, kCalibration).rates, 0.2);

  SealStatus commissioned;
  commissioned.state = SealState::Normal;
  commissioned.pending_target = SealState::Normal;
  int fails = 0;
  int compromised = 0;
  std::uint64_t min_central = UINT64_MAX;
  an::PhaseSumCounts pooled;
  an::ObservedRates total;
  for (int b = 0; b < kBatches; ++b) {
    const std::int64_t first = kCalibration + static_cast<std::int64_t>(b) * kBatch;
    const auto ev = sim.run(first, kBatch);
    const auto m = an::match_coincidences(ev.active, ev.reference, params);
    const auto agg = aggregate_span(ev, m, first, first + kBatch);
    SealMonitor monitor(AnalyticsConfig{}, baseline, commissioned);
    const auto r = monitor.evaluate(agg);
    fails += r.assessment.verdict == an::BellVerdict::Fail;
    compromised += r.state_after == SealState::Compromised;
    min_central = std::min<std::uint64_t>(min_central, agg.counts.at_zero() + agg.counts.at_pi());
    pooled += agg.counts;
    total.windows += agg.rates.windows;
    total.active_singles += agg.rates.active_singles;
    total.reference_singles += agg.rates.reference_singles;
  }
  const auto est = an::estimate_visibility(pooled, kCalibration, kCalibration + kBatch * kBatches - 1);
  auto z = [&](std::uint64_t observed, double base_rate) {
    const double n = static_cast<double>(total.windows);
    const double var = static_cast<double>(observed) + base_rate * n * n / static_cast<double>(baseline.windows);
    return (static_cast<double>(observed) - base_rate * n) / std::sqrt(var);
  };
  const double za = z(total.active_singles, baseline.active_singles);
  const double zr = z(total.reference_singles, baseline.reference_singles);
  const bool ok = est.v_hat <= 0.05 && min_central >= 400 && fails >= 999 && compromised >= 999 &&
                  std::abs(za) <= 4.0 && std::abs(zr) <= 4.0;
  return {ok, fmt("pooled v_hat=%.4f (se %.4f) min_central_per_batch=%llu fail=%d/1000 compromised=%d/1000 "
                  "singles_z active=%.2f reference=%.2f",
                  est.v_hat, est.std_err, static_cast<unsigned long long>(min_central), fails, compromised, za, zr)};
}

Outcome loss_attack_separation() {
  LinkSetup s = ideal_link(0.2);
  s.source.source_visibility = 0.98;
  constexpr std::int64_t kCommissioning = 100'000'000;
  constexpr std::int64_t kBatch = 5'000'000;
  constexpr int kBatchesPerRep = 3;
  constexpr int kReps = 100;
  const auto params = match_params(s);

  an::ObservedRates calib;
  {
    const Simulator sim(s, {}, 4004);
    for (std::int64_t first = 0; first < kCommissioning; first += 10'000'000) {
      const auto ev = sim.run(first, 10'000'000);
      const auto m = an::match_coincidences(ev.active, ev.reference, params);
      const auto r = aggregate_span(ev, m, first, first + 10'000'000).rates;
      calib.windows += r.windows;
      calib.active_singles += r.active_singles;
      calib.reference_singles += r.reference_singles;
      calib.coincidences += r.coincidences;
    }
  }
  const auto baseline = learn_link_baseline(s, calib, 0.2);

  SealStatus commissioned;
  commissioned.state = SealState::Normal;
  commissioned.pending_target = SealState::Normal;
  int flagged = 0;
  int all_pass = 0;
  int degraded = 0;
  int ever_compromised = 0;
  for (int rep = 0; rep < kReps; ++rep) {
    const std::int64_t span = kBatch * kBatchesPerRep;
    const adversary::AttackSchedule tap({adversary::AttackPlan{adversary::PassiveTap{1.0}, 0, span - 1}});
    const Simulator sim(s, tap, 50'000 + static_cast<std::uint64_t>(rep));
    SealMonitor monitor(AnalyticsConfig{}, baseline, commissioned);
    bool saw_flag = false;
    bool passes = true;
    bool compromised = false;
    for (int b = 0; b < kBatchesPerRep; ++b) {
      const std::int64_t first = static_cast<std::int64_t>(b) * kBatch;
      const auto ev = sim.run(first, kBatch);
      const auto m = an::match_coincidences(ev.active, ev.reference, params);
      const auto r = monitor.evaluate(aggregate_span(ev, m, first, first + kBatch));
      saw_flag = saw_flag || r.assessment.rate == an::RateFlag::LossAnomaly;
      passes = passes && r.assessment.verdict == an::BellVerdict::Pass;
      compromised = compromised || r.state_after == SealState::Compromised;
    }
    flagged += saw_flag;
    all_pass += passes;
    degraded += monitor.status().state == SealState::Degraded;
    ever_compromised += compromised;
  }
  const bool ok = flagged == kReps && all_pass == kReps && degraded == kReps && ever_compromised == 0;
  return {ok, fmt("replications=%d loss_anomaly=%d bell_pass_every_batch=%d final_degraded=%d ever_compromised=%d",
                  kReps, flagged, all_pass, degraded, ever_compromised)};
}

Outcome oracle_equivalence() {
  // Simulated pairs with a fixed phase on each receiver, no jitter, no dark
  // counts: the arrival offsets reveal which arm each photon took.
  constexpr int kPairs = 100'000;
  double worst_p = 1.0;
  std::string worst;
  for (double v : {0.0, 0.5, 1.0}) {
    for (double phi : {0.0, optics::kPi / 2, optics::kPi}) {
      LinkSetup s = ideal_link(0.2);
      s.source.source_visibility = v;
      s.active_rx.phase_set = {phi};
      s.reference_rx.phase_set = {0.0};
      s.active_rx.detector.jitter_sigma = 0;
      s.reference_rx.detector.jitter_sigma = 0;
      const Simulator sim(s, {}, 5005 + static_cast<std::uint64_t>(100 * v + 10 * phi));
      std::array<double, 4> counts{};
      int pairs = 0;
      std::int64_t next = 0;
      while (pairs < kPairs) {
        const auto ev = sim.run(next, 1'000'000);
        next += 1'000'000;
        std::size_t j = 0;
        for (const auto& a : ev.active) {
          while (j < ev.reference.size() && ev.reference[j].window_index < a.window_index) ++j;
          if (j == ev.reference.size() || ev.reference[j].window_index != a.window_index) continue;
          const auto& r = ev.reference[j];
          const bool a_long = a.time_tag - a.window_index * s.window_duration - s.active_channel.propagation_delay ==
                              s.active_rx.path_delay;
          const bool r_long = r.time_tag - r.window_index * s.window_duration - s.reference_channel.propagation_delay ==
                              s.reference_rx.path_delay;
          counts[(a_long ? 2u : 0u) + (r_long ? 1u : 0u)] += 1;
          if (++pairs == kPairs) break;
        }
      }
      const auto expected = oracle::conditional_paths(v, phi, 0.0);
      double chi2 = 0.0;
      int cells = 0;
      bool impossible_seen = false;
      for (std::size_t k = 0; k < 4; ++k) {
        const double e = expected[k] * kPairs;
        if (e < 1e-9) {
          impossible_seen = impossible_seen || counts[k] > 0;
          continue;
        }
        chi2 += (counts[k] - e) * (counts[k] - e) / e;
        ++cells;
      }
      const double p = impossible_seen ? 0.0
                                       : boost::math::cdf(boost::math::complement(
                                             boost::math::chi_squared(cells - 1), chi2));
      if (p < worst_p) {
        worst_p = p;
        worst = fmt("V=%.1f Phi=%.4f", v, phi);
      }
    }
  }
  return {worst_p > 0.001, fmt("9 settings x %d pairs, min chi-square p=%.4f at %s", kPairs, worst_p, worst.c_str())};
}

Outcome estimator_calibration() {
  constexpr int kReps = 100;
  constexpr std::int64_t kWindows = 160'000;
  bool ok = true;
  std::string detail;
  std::uint64_t seed = 600'000;
  for (double v : {0.0, 0.3, 0.7071, 0.95}) {
    LinkSetup s = ideal_link(0.2);
    s.source.source_visibility = v;
    std::vector<double> vs;
    double se_sum = 0.0;
    for (int i = 0; i < kReps; ++i) {
      const auto e = run_estimate(s, {}, seed++, kWindows);
      vs.push_back(e.v_hat);
      se_sum += e.std_err;
    }
    double mean = 0.0;
    for (double x : vs) mean += x;
    mean /= kReps;
    double ss = 0.0;
    for (double x : vs) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (kReps - 1));
    const double se = se_sum / kReps;
    const bool mean_ok = std::abs(mean - v) <= 3.0 * se / std::sqrt(static_cast<double>(kReps));
    const bool sd_ok = std::abs(sd - se) <= 0.5 * se;
    ok = ok && mean_ok && sd_ok;
    detail += fmt("V=%.4f mean=%.4f sd=%.4f se=%.4f; ", v, mean, sd, se);
  }
  return {ok, detail};
}

std::filesystem::path scenario_path(const char* name) { return std::filesystem::path(QSEAL_SCENARIO_DIR) / name; }

Outcome routing_reaction() {
  const auto cfg = scenario::load_config(scenario_path("ring_intercept.json"));
  const auto result = scenario::execute(cfg);
  const auto demo = scenario::route_demo(cfg, result, cfg.network->route_src, cfg.network->route_dst);
  const std::string before = scenario::format_path(demo.before);
  const std::string after = scenario::format_path(demo.after);
  const bool demo_ok = before == "A -> B -> C" && after == "A -> D -> C" && demo.seal_state == SealState::Compromised;

  std::mt19937_64 gen(7007);
  int graphs = 0;
  int queries = 0;
  int mismatches = 0;
  const std::vector<network::RoutingPolicy> policies{{network::RoutingMode::RequireNormalSeals, 10.0},
                                                     {network::RoutingMode::AvoidCompromised, 10.0},
                                                     {network::RoutingMode::CostPenalty, 3.0}};
  for (int n = 2; n <= 8; ++n) {
    for (int t = 0; t < 40; ++t) {
      network::NetworkGraph g;
      for (int i = 0; i < n; ++i) g.add_node(std::string(1, static_cast<char>('A' + i)));
      std::bernoulli_distribution edge(0.5);
      std::uniform_int_distribution<int> cost(1, 5);
      std::bernoulli_distribution sealed(0.75);
      std::uniform_int_distribution<int> state(0, 3);
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          if (!edge(gen)) continue;
          const std::string a(1, static_cast<char>('A' + i));
          const std::string b(1, static_cast<char>('A' + j));
          g.add_link(a + b, a, b, cost(gen), sealed(gen), static_cast<SealState>(state(gen)));
        }
      }
      ++graphs;
      for (const auto& policy : policies) {
        for (const auto& src : g.nodes()) {
          for (const auto& dst : g.nodes()) {
            ++queries;
            const auto got = network::route(g, src, dst, policy);
            const auto want = oracle::brute_force_route(g, src, dst, policy);
            if (got.has_value() != want.has_value() || (got && *got != want->nodes)) ++mismatches;
          }
        }
      }
    }
  }
  return {demo_ok && mismatches == 0,
          fmt("ring before=[%s] after=[%s] seal=%s; brute-force: %d graphs, %d queries, %d mismatches", before.c_str(),
              after.c_str(), to_string(demo.seal_state), graphs, queries, mismatches)};
}

Outcome fractional_attack() {
  LinkSetup s = ideal_link(0.2);
  s.source.source_visibility = 0.98;
  constexpr std::int64_t kWindows = 2'000'000;
  bool ok = true;
  std::string detail;
  for (double f : {0.25, 0.5}) {
    // f is the untouched fraction; the attack covers the remaining windows.
    const auto start = static_cast<std::int64_t>(f * kWindows);
    const adversary::AttackSchedule attacks({adversary::AttackPlan{adversary::InterceptResend{}, start, kWindows - 1}});
    const auto e = run_estimate(s, attacks, 8008 + static_cast<std::uint64_t>(f * 100), kWindows);
    const double expected = f * s.source.source_visibility;
    const bool pass = std::abs(e.v_hat - expected) <= 3.0 * e.std_err;
    ok = ok && pass;
    detail += fmt("f=%.2f v_hat=%.4f expected=%.4f se=%.4f; ", f, e.v_hat, expected, e.std_err);
  }
  return {ok, detail};
}

std::uint64_t fnv1a(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::istreambuf_iterator<char> it(in), end; it != end; ++it) {
    h ^= static_cast<unsigned char>(*it);
    h *= 0x100000001b3ULL;
  }
  return h;
}

Outcome determinism() {
  const auto cfg = scenario::load_config(scenario_path("ring_intercept.json"));
  const auto base = std::filesystem::temp_directory_path() / "qseal_acceptance_determinism";
  std::filesystem::remove_all(base);
  std::vector<std::uint64_t> hashes[2];
  for (int run = 0; run < 2; ++run) {
    const auto files = scenario::write_outputs(cfg, scenario::execute(cfg), base / std::to_string(run), true);
    for (const auto& p : {files.event_log, files.histogram, files.report, files.link_reports}) {
      hashes[run].push_back(fnv1a(p));
    }
  }
  std::filesystem::remove_all(base);
  std::string detail;
  for (std::size_t i = 0; i < hashes[0].size(); ++i) {
    detail += fmt("%016llx/%016llx ", static_cast<unsigned long long>(hashes[0][i]),
                  static_cast<unsigned long long>(hashes[1][i]));
  }
  return {hashes[0] == hashes[1], "events,histogram,report,link_reports: " + detail};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"1 visibility recovery", visibility_recovery},
      {"2 bell threshold decision", bell_decision},
      {"3 attack detection", attack_detection},
      {"4 loss/attack separation", loss_attack_separation},
      {"5 oracle equivalence", oracle_equivalence},
      {"6 estimator calibration", estimator_calibration},
      {"7 routing reaction", routing_reaction},
      {"8 fractional attack", fractional_attack},
      {"9 determinism", determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  %-28s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
