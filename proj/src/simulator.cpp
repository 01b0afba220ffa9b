#include "qseal/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "qseal/errors.hpp"

namespace qseal {

namespace {

double uniform01(SplitMix64& rng) { return std::generate_canonical<double, 64>(rng); }

bool coin(SplitMix64& rng, double p) { return p >= 1.0 || uniform01(rng) < p; }

}  // namespace

WindowSampler::WindowSampler(const LinkSetup& setup) : setup_(setup) {
  setup_.validate();
  auto make_arm = [&](ReceiverId rx) {
    Arm arm;
    const auto& ch = setup_.channel(rx);
    const auto& det = setup_.receiver(rx).detector;
    arm.transmission = ch.transmission();
    arm.efficiency = det.efficiency;
    arm.delay = ch.propagation_delay;
    arm.jitter = det.jitter_sigma;
    const double dark = setup_.dark_per_window(rx);
    arm.has_dark = dark > 0.0;
    if (arm.has_dark) arm.dark = std::poisson_distribution<unsigned>::param_type(dark);
    return arm;
  };
  active_ = make_arm(ReceiverId::Active);
  reference_ = make_arm(ReceiverId::Reference);
}

PreparedAttack WindowSampler::prepare(const adversary::AttackPlan& plan) const {
  PreparedAttack prepared;
  prepared.plan = &plan;
  prepared.active_transmission = adversary::transform_channel(plan.kind, setup_.active_channel).transmission();
  if (const auto* spoof = std::get_if<adversary::ClassicalSpoof>(&plan.kind)) {
    prepared.spoof_mean_photons =
        spoof->pulse_rate_hz * static_cast<double>(setup_.window_duration) / static_cast<double>(kPsPerSecond);
    if (prepared.spoof_mean_photons >= 1.0) {
      throw ConfigError("spoof pulse rate gives >= 1 photon per window; replica pulses must be weak");
    }
  }
  return prepared;
}

TimePs WindowSampler::photon_tag(const Arm& arm, TimePs epoch, bool long_path, TimePs extra_sigma,
                                 SplitMix64& rng) const {
  TimePs tag = epoch + arm.delay + (long_path ? setup_.active_rx.path_delay : 0);
  const double sigma = std::hypot(static_cast<double>(arm.jitter), static_cast<double>(extra_sigma));
  if (sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, sigma);
    tag += std::llround(noise(rng));
  }
  return std::max(tag, epoch);
}

void WindowSampler::sample(const PreparedAttack* attack, std::int64_t window_index, SplitMix64& rng,
                           std::vector<DetectionEvent>& out) const {
  using optics::JointPhotonState;

  JointPhotonState state = emit_window(setup_.source, rng);
  double active_transmission = active_.transmission;
  unsigned spoof_photons = 0;
  TimePs spoof_sigma = 0;
  if (attack != nullptr) {
    const auto& kind = attack->plan->kind;
    state = adversary::transform_state(kind, state);
    active_transmission = attack->active_transmission;
    if (attack->spoof_mean_photons > 0.0) {
      spoof_photons = emit_weak_pulse(WeakPulseSource{attack->spoof_mean_photons}, rng);
      spoof_sigma = std::get<adversary::ClassicalSpoof>(kind).timing_error_sigma;
    }
  }

  unsigned dark_active = 0;
  unsigned dark_reference = 0;
  if (active_.has_dark) dark_active = std::poisson_distribution<unsigned>(active_.dark)(rng);
  if (reference_.has_dark) dark_reference = std::poisson_distribution<unsigned>(reference_.dark)(rng);

  if (state.is_vacuum() && spoof_photons == 0 && dark_active == 0 && dark_reference == 0) return;

  const optics::PhasePair phases{draw_phase(setup_.active_rx, rng), draw_phase(setup_.reference_rx, rng)};
  const TimePs epoch = window_index * setup_.window_duration;

  // Photons that reach the detector-side port, with the arm each took.
  struct Arrival {
    bool present = false;
    bool long_path = false;
  };
  Arrival a;
  Arrival r;

  if (state.is_entangled()) {
    state = optics::apply_decoherence(state, setup_.active_channel.decoherence_factor);
    state = optics::apply_decoherence(state, setup_.reference_channel.decoherence_factor);
    const bool a_alive = coin(rng, active_transmission);
    const bool r_alive = coin(rng, reference_.transmission);
    if (a_alive && r_alive) {
      const auto ports = optics::monitored_port_distribution(state, phases);
      const double u = uniform01(rng);
      if (u < ports.both) {
        const auto pp = optics::sample_path_pair(optics::joint_path_distribution(state, phases), uniform01(rng));
        a = {true, optics::active_took_long(pp)};
        r = {true, optics::reference_took_long(pp)};
      } else if (u < ports.both + ports.active_only) {
        a = {true, coin(rng, 0.5)};
      } else if (u < ports.both + ports.active_only + ports.reference_only) {
        r = {true, coin(rng, 0.5)};
      }
    } else if (a_alive) {
      if (coin(rng, 0.5)) a = {true, coin(rng, 0.5)};
    } else if (r_alive) {
      if (coin(rng, 0.5)) r = {true, coin(rng, 0.5)};
    }
  } else if (state.is_replica()) {
    if (coin(rng, reference_.transmission) && coin(rng, 0.5)) r = {true, coin(rng, 0.5)};
  }

  if (a.present && !coin(rng, active_.efficiency)) a.present = false;
  if (r.present && !coin(rng, reference_.efficiency)) r.present = false;

  auto emit = [&](ReceiverId rx, TimePs tag, double phase, Origin origin) {
    out.push_back(DetectionEvent{rx, tag, window_index, phase, origin});
  };

  if (a.present) emit(ReceiverId::Active, photon_tag(active_, epoch, a.long_path, 0, rng), phases.active, Origin::Photon);
  for (unsigned i = 0; i < spoof_photons; ++i) {
    // Replica light still has to cross the receiver: port, arm, efficiency.
    if (!coin(rng, 0.5)) continue;
    const bool long_path = coin(rng, 0.5);
    if (!coin(rng, active_.efficiency)) continue;
    emit(ReceiverId::Active, photon_tag(active_, epoch, long_path, spoof_sigma, rng), phases.active, Origin::Photon);
  }
  if (dark_active > 0) {
    std::uniform_int_distribution<TimePs> where(0, setup_.window_duration - 1);
    for (unsigned i = 0; i < dark_active; ++i) {
      emit(ReceiverId::Active, epoch + where(rng), phases.active, Origin::DarkCount);
    }
  }
  if (r.present) {
    emit(ReceiverId::Reference, photon_tag(reference_, epoch, r.long_path, 0, rng), phases.reference, Origin::Photon);
  }
  if (dark_reference > 0) {
    std::uniform_int_distribution<TimePs> where(0, setup_.window_duration - 1);
    for (unsigned i = 0; i < dark_reference; ++i) {
      emit(ReceiverId::Reference, epoch + where(rng), phases.reference, Origin::DarkCount);
    }
  }
}

std::vector<DetectionEvent> simulate_window(const LinkSetup& setup, const adversary::AttackPlan* attack,
                                            std::int64_t window_index, SplitMix64& rng) {
  const WindowSampler sampler(setup);
  std::vector<DetectionEvent> out;
  if (attack != nullptr) {
    const PreparedAttack prepared = sampler.prepare(*attack);
    sampler.sample(&prepared, window_index, rng, out);
  } else {
    sampler.sample(nullptr, window_index, rng, out);
  }
  return out;
}

Simulator::Simulator(const LinkSetup& setup, adversary::AttackSchedule attacks, std::uint64_t master_seed)
    : sampler_(setup), attacks_(std::move(attacks)), seed_(master_seed) {
  prepared_.reserve(attacks_.plans().size());
  for (const auto& plan : attacks_.plans()) prepared_.push_back(sampler_.prepare(plan));
}

EventStreams Simulator::run(std::int64_t first_window, std::int64_t count) const {
  if (first_window < 0 || count < 0) throw PreconditionError("window range must be non-negative");
  EventStreams streams;
  std::vector<DetectionEvent> scratch;
  const auto plans = attacks_.plans();
  for (std::int64_t w = first_window; w < first_window + count; ++w) {
    const adversary::AttackPlan* plan = attacks_.in_force(w);
    const PreparedAttack* prepared = plan != nullptr ? &prepared_[static_cast<std::size_t>(plan - plans.data())] : nullptr;
    SplitMix64 rng = window_stream(seed_, w);
    scratch.clear();
    sampler_.sample(prepared, w, rng, scratch);
    for (const auto& e : scratch) streams.of(e.receiver).push_back(e);
  }
  sort_stream(streams.active);
  sort_stream(streams.reference);
  return streams;
}

void sort_stream(std::vector<DetectionEvent>& events) {
  auto key_less = [](const DetectionEvent& x, const DetectionEvent& y) {
    if (x.time_tag != y.time_tag) return x.time_tag < y.time_tag;
    return x.window_index < y.window_index;
  };
  if (!std::is_sorted(events.begin(), events.end(), key_less)) {
    std::stable_sort(events.begin(), events.end(), key_less);
  }
}

}  // namespace qseal
