#include <gtest/gtest.h>

#include <random>

#include "qseal/seal_state.hpp"

using namespace qseal;
using analytics::BellVerdict;
using analytics::RateFlag;

namespace {

BatchAssessment batch(std::optional<BellVerdict> v, RateFlag r, std::int64_t last = 0) {
  BatchAssessment b;
  b.verdict = v;
  b.rate = r;
  b.first_window = last;
  b.last_window = last;
  if (v) {
    b.estimate = analytics::VisibilityEstimate{};
    b.estimate->v_hat = 0.9;
  }
  return b;
}

SealStatus at(SealState s) {
  SealStatus st;
  st.state = s;
  st.pending_target = s;
  return st;
}

const auto kPassNominal = batch(BellVerdict::Pass, RateFlag::Nominal);
const auto kFail = batch(BellVerdict::Fail, RateFlag::Nominal);
const auto kInconclusive = batch(BellVerdict::Inconclusive, RateFlag::Nominal);

}  // namespace

TEST(TargetState, Mapping) {
  EXPECT_EQ(target_state(BellVerdict::Pass, RateFlag::Nominal), SealState::Normal);
  EXPECT_EQ(target_state(BellVerdict::Pass, RateFlag::LossAnomaly), SealState::Degraded);
  EXPECT_EQ(target_state(BellVerdict::Inconclusive, RateFlag::Nominal), SealState::Degraded);
  EXPECT_EQ(target_state(BellVerdict::Inconclusive, RateFlag::LossAnomaly), SealState::Degraded);
  for (auto r : {RateFlag::Nominal, RateFlag::LossAnomaly, RateFlag::NoSignal}) {
    EXPECT_EQ(target_state(BellVerdict::Fail, r), SealState::Compromised);
    EXPECT_EQ(target_state(std::nullopt, r), SealState::Offline);
  }
  EXPECT_EQ(target_state(BellVerdict::Pass, RateFlag::NoSignal), SealState::Offline);
  EXPECT_EQ(target_state(BellVerdict::Inconclusive, RateFlag::NoSignal), SealState::Offline);
}

TEST(UpdateSealState, Examples) {
  auto s = update_seal_state(at(SealState::Normal), kFail);
  EXPECT_EQ(s.state, SealState::Compromised);

  s = update_seal_state(at(SealState::Normal), kInconclusive);
  EXPECT_EQ(s.state, SealState::Normal);
  EXPECT_EQ(s.pending_target, SealState::Degraded);
  EXPECT_EQ(s.pending_count, 1u);

  s = SealStatus{};
  EXPECT_EQ(s.state, SealState::Offline);
  s = update_seal_state(s, kPassNominal);
  s = update_seal_state(s, kPassNominal);
  EXPECT_EQ(s.state, SealState::Offline);
  s = update_seal_state(s, batch(BellVerdict::Pass, RateFlag::Nominal, 77));
  EXPECT_EQ(s.state, SealState::Normal);
  EXPECT_EQ(s.since_window, 77);
}

TEST(UpdateSealState, InterruptedRunResetsHysteresis) {
  auto s = at(SealState::Normal);
  s = update_seal_state(s, kInconclusive);
  s = update_seal_state(s, kInconclusive);
  s = update_seal_state(s, kPassNominal);
  s = update_seal_state(s, kInconclusive);
  s = update_seal_state(s, kInconclusive);
  EXPECT_EQ(s.state, SealState::Normal);
  s = update_seal_state(s, kInconclusive);
  EXPECT_EQ(s.state, SealState::Degraded);
}

TEST(UpdateSealState, CompromisedExitsOnlyAfterKPasses) {
  auto s = update_seal_state(at(SealState::Normal), kFail);
  ASSERT_EQ(s.state, SealState::Compromised);
  s = update_seal_state(s, kPassNominal);
  s = update_seal_state(s, kPassNominal);
  s = update_seal_state(s, kInconclusive);
  EXPECT_EQ(s.state, SealState::Compromised);
  s = update_seal_state(s, batch(std::nullopt, RateFlag::NoSignal));
  s = update_seal_state(s, batch(std::nullopt, RateFlag::NoSignal));
  s = update_seal_state(s, batch(std::nullopt, RateFlag::NoSignal));
  EXPECT_EQ(s.state, SealState::Compromised);
  s = update_seal_state(s, kPassNominal);
  s = update_seal_state(s, kPassNominal);
  EXPECT_EQ(s.state, SealState::Compromised);
  s = update_seal_state(s, kPassNominal);
  EXPECT_EQ(s.state, SealState::Normal);
}

TEST(UpdateSealState, CustomHysteresis) {
  auto s = update_seal_state(SealStatus{}, kPassNominal, 1);
  EXPECT_EQ(s.state, SealState::Normal);
  s = SealStatus{};
  for (int i = 0; i < 4; ++i) s = update_seal_state(s, kPassNominal, 5);
  EXPECT_EQ(s.state, SealState::Offline);
  s = update_seal_state(s, kPassNominal, 5);
  EXPECT_EQ(s.state, SealState::Normal);
}

TEST(UpdateSealState, RecordsEvidence) {
  const auto b = batch(BellVerdict::Pass, RateFlag::LossAnomaly, 5);
  const auto s = update_seal_state(SealStatus{}, b);
  ASSERT_TRUE(s.last_estimate.has_value());
  EXPECT_EQ(s.last_verdict, BellVerdict::Pass);
  EXPECT_EQ(s.last_rate, RateFlag::LossAnomaly);
}

TEST(UpdateSealState, RandomSequencesRespectRules) {
  // Property check against a direct restatement of the rules.
  std::mt19937_64 gen(5);
  const std::vector<BatchAssessment> menu{
      kPassNominal, kFail, kInconclusive, batch(BellVerdict::Pass, RateFlag::LossAnomaly),
      batch(std::nullopt, RateFlag::NoSignal), batch(BellVerdict::Pass, RateFlag::NoSignal)};
  std::uniform_int_distribution<std::size_t> pick(0, menu.size() - 1);
  for (int trial = 0; trial < 200; ++trial) {
    SealStatus s;
    std::vector<SealState> targets;
    std::vector<bool> passed;
    for (int i = 0; i < 60; ++i) {
      const auto& b = menu[pick(gen)];
      const SealState before = s.state;
      const SealState t = target_state(b.verdict, b.rate);
      targets.push_back(t);
      passed.push_back(b.verdict == BellVerdict::Pass);
      s = update_seal_state(s, b);
      if (t == SealState::Compromised) {
        EXPECT_EQ(s.state, SealState::Compromised);
        continue;
      }
      if (s.state != before) {
        ASSERT_GE(targets.size(), 3u);
        for (std::size_t k = targets.size() - 3; k < targets.size(); ++k) EXPECT_EQ(targets[k], s.state);
        if (before == SealState::Compromised) {
          for (std::size_t k = passed.size() - 3; k < passed.size(); ++k) EXPECT_TRUE(passed[k]);
        }
      }
    }
  }
}

TEST(SealStateNames, RoundTrip) {
  for (auto s : {SealState::Normal, SealState::Degraded, SealState::Compromised, SealState::Offline}) {
    EXPECT_EQ(parse_seal_state(to_string(s)), s);
  }
  EXPECT_FALSE(parse_seal_state("broken").has_value());
}
