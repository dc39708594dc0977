#include <gtest/gtest.h>

#include <map>

#include "teleran/agents/baselines.hpp"
#include "teleran/orchestrator/ran_ai.hpp"
#include "teleran/sim/rng.hpp"

using namespace teleran;
using namespace teleran::orchestrator;
using app::SegmentationMode;

namespace {

// Policy that plays a pseudo-random script and remembers everything it sees.
class ScriptedPolicy final : public agents::Policy {
 public:
  explicit ScriptedPolicy(std::uint64_t seed) : rng_("script", seed) {}

  std::string name() const override { return "scripted"; }
  bool learns() const override { return true; }
  SegmentationMode act(const agents::StateVector& state, const agents::DecisionContext& ctx, bool) override {
    const auto m = app::mode_from_index(rng_.index(3));
    issued[ctx.vehicle_id].push_back(m);
    states_seen[ctx.vehicle_id].push_back(state);
    ++acts_this_tick;
    return m;
  }
  void observe(const agents::Transition& t) override { transitions[t.vehicle_id].push_back(t); }
  void end_tick() override {
    acts_per_tick.push_back(acts_this_tick);
    acts_this_tick = 0;
  }
  void end_episode() override { ++episodes_ended; }
  std::unique_ptr<Policy> frozen_copy() const override { return std::make_unique<ScriptedPolicy>(0); }

  std::map<VehicleId, std::vector<SegmentationMode>> issued;
  std::map<VehicleId, std::vector<agents::StateVector>> states_seen;
  std::map<VehicleId, std::vector<agents::Transition>> transitions;
  std::vector<int> acts_per_tick;
  int acts_this_tick = 0;
  int episodes_ended = 0;

 private:
  sim::RngStream rng_;
};

// The "plant": the delay of a closing window is a function of the mode the
// policy issued for that vehicle most recently, i.e. the mode in force while
// the window was open.
class PlantSource final : public MeasurementSource {
 public:
  explicit PlantSource(const ScriptedPolicy& policy) : policy_(policy) {}

  static double delay_for(SegmentationMode m) { return 0.010 * static_cast<double>(app::mode_index(m) + 1); }

  app::AppKpiWindow close_app_window(VehicleId id, SimTime) override {
    app::AppKpiWindow w;
    w.n_tx = w.n_rx = 10;
    w.delay_mean_s = w.delay_min_s = w.delay_max_s = delay_for(policy_.issued.at(id).back());
    ++closes[id];
    return w;
  }
  ran::LinkStatsWindow close_link_window(VehicleId id, SimTime) override {
    ran::LinkStatsWindow l;
    l.valid = true;
    l.mean_sinr_db = static_cast<double>(id);
    return l;
  }

  std::map<VehicleId, int> closes;

 private:
  const ScriptedPolicy& policy_;
};

RanAiConfig learning_config() {
  RanAiConfig cfg;
  cfg.thresholds.alpha = 0.0;  // reward depends on delay only
  cfg.learning = true;
  cfg.explore = true;
  cfg.state_config = metrics::StateConfig::kAppNet;
  return cfg;
}

void run_ticks(RanAi& ran_ai, MeasurementSource& src, int ticks) {
  ran_ai.begin_episode();
  for (int t = 0; t < ticks; ++t) ran_ai.on_update_tick(src);
  ran_ai.on_episode_end(src);
}

}  // namespace

TEST(RanAi, RewardScoresTheActionInForceDuringItsWindow) {
  ScriptedPolicy policy(11);
  PlantSource src(policy);
  RanAi ran_ai(learning_config(), policy);
  for (VehicleId v = 0; v < 3; ++v) ran_ai.register_vehicle(v);
  run_ticks(ran_ai, src, 200);

  const metrics::KpiThresholds thr = learning_config().thresholds;
  for (VehicleId v = 0; v < 3; ++v) {
    const auto& trs = policy.transitions.at(v);
    ASSERT_EQ(trs.size(), 200u);
    for (std::size_t k = 0; k < trs.size(); ++k) {
      const auto& t = trs[k];
      EXPECT_EQ(t.action, agents::action_of(policy.issued.at(v)[k]));
      const double expected = (thr.delay_max_s - PlantSource::delay_for(agents::mode_of(t.action))) / thr.delay_max_s;
      ASSERT_NEAR(t.reward, expected, 1e-12) << "vehicle " << v << " step " << k;
      EXPECT_EQ(t.step_index, k);
      EXPECT_EQ(t.state, policy.states_seen.at(v)[k]);
      if (k + 1 < trs.size()) {
        EXPECT_EQ(t.next_state, policy.states_seen.at(v)[k + 1]);
        EXPECT_FALSE(t.terminal);
      } else {
        EXPECT_TRUE(t.terminal);
      }
    }
  }
}

TEST(RanAi, EightHundredTicksGiveEightHundredTransitionsPerVehicle) {
  ScriptedPolicy policy(1);
  PlantSource src(policy);
  RanAi ran_ai(learning_config(), policy);
  for (VehicleId v = 0; v < 5; ++v) ran_ai.register_vehicle(v);
  run_ticks(ran_ai, src, 800);
  EXPECT_EQ(ran_ai.ticks(), 800u);
  for (VehicleId v = 0; v < 5; ++v) {
    EXPECT_EQ(policy.transitions.at(v).size(), 800u);
    EXPECT_EQ(policy.issued.at(v).size(), 800u);
    EXPECT_EQ(src.closes.at(v), 800);
  }
  EXPECT_EQ(policy.episodes_ended, 1);
  for (int n : policy.acts_per_tick) EXPECT_EQ(n, 5);
}

TEST(RanAi, FirstTickActsWithoutTransition) {
  ScriptedPolicy policy(2);
  PlantSource src(policy);
  RanAi ran_ai(learning_config(), policy);
  ran_ai.register_vehicle(0);
  ran_ai.begin_episode();
  ran_ai.on_update_tick(src);
  EXPECT_TRUE(policy.transitions.empty());
  EXPECT_EQ(policy.issued.at(0).size(), 1u);
  EXPECT_TRUE(src.closes.empty());
  for (double x : policy.states_seen.at(0)[0]) EXPECT_EQ(x, 0.0);
}

TEST(RanAi, ConstantPolicyNeverChangesMode) {
  agents::ConstantPolicy policy(SegmentationMode::kAggressive);
  ScriptedPolicy dummy(0);
  dummy.issued[0].push_back(SegmentationMode::kRaw);
  dummy.issued[1].push_back(SegmentationMode::kRaw);
  PlantSource src(dummy);
  RanAiConfig cfg;
  RanAi ran_ai(cfg, policy);
  ran_ai.register_vehicle(0);
  ran_ai.register_vehicle(1);
  ran_ai.begin_episode();
  EXPECT_EQ(ran_ai.mode(0), SegmentationMode::kConservative);
  for (int t = 0; t < 50; ++t) {
    ran_ai.on_update_tick(src);
    EXPECT_EQ(ran_ai.mode(0), SegmentationMode::kAggressive);
    EXPECT_EQ(ran_ai.mode(1), SegmentationMode::kAggressive);
  }
}

TEST(RanAi, RegistrationRules) {
  agents::ConstantPolicy policy(SegmentationMode::kRaw);
  RanAi ran_ai(RanAiConfig{}, policy);
  ran_ai.register_vehicle(0);
  EXPECT_THROW(ran_ai.register_vehicle(0), ContractViolation);
  EXPECT_THROW(ran_ai.register_vehicle(5), ContractViolation);
  ran_ai.register_vehicle(1);
  EXPECT_EQ(ran_ai.vehicle_count(), 2u);
}

TEST(RanAi, RegisterThenTickDecidesForNewVehicle) {
  ScriptedPolicy policy(3);
  PlantSource src(policy);
  RanAi ran_ai(learning_config(), policy);
  ran_ai.register_vehicle(0);
  ran_ai.begin_episode();
  ran_ai.on_update_tick(src);
  ran_ai.register_vehicle(1);
  policy.issued[1].push_back(SegmentationMode::kConservative);  // initial mode, for the plant
  ran_ai.on_update_tick(src);
  EXPECT_EQ(policy.issued.at(1).size(), 2u);
  EXPECT_EQ(policy.transitions.count(1), 0u);
}

TEST(RanAi, StateDimensionIndependentOfCellSize) {
  for (std::size_t n : {1u, 5u, 10u}) {
    ScriptedPolicy policy(4);
    PlantSource src(policy);
    RanAi ran_ai(learning_config(), policy);
    for (VehicleId v = 0; v < n; ++v) ran_ai.register_vehicle(v);
    run_ticks(ran_ai, src, 3);
    for (const auto& [v, states] : policy.states_seen) {
      for (const auto& s : states) EXPECT_EQ(s.size(), 10u);
    }
  }
}

TEST(RanAi, NotLearningSendsNoTransitions) {
  ScriptedPolicy policy(5);
  PlantSource src(policy);
  auto cfg = learning_config();
  cfg.learning = false;
  RanAi ran_ai(cfg, policy);
  ran_ai.register_vehicle(0);
  run_ticks(ran_ai, src, 30);
  EXPECT_TRUE(policy.transitions.empty());
  EXPECT_TRUE(policy.acts_per_tick.empty());
  EXPECT_EQ(policy.episodes_ended, 0);
}

TEST(RanAi, TickLogUsesWindowStep) {
  ScriptedPolicy policy(6);
  PlantSource src(policy);
  RanAi ran_ai(learning_config(), policy);
  ran_ai.register_vehicle(0);
  std::vector<TickRecord> log;
  ran_ai.set_tick_logger([&](const TickRecord& r) { log.push_back(r); });
  run_ticks(ran_ai, src, 10);
  ASSERT_EQ(log.size(), 10u);
  double cumulative = 0.0;
  for (std::size_t k = 0; k < log.size(); ++k) {
    EXPECT_EQ(log[k].step, k);
    EXPECT_EQ(log[k].observation.mode, policy.issued.at(0)[k]);
    cumulative += log[k].observation.reward;
  }
  EXPECT_GE(cumulative, 0.0);
  EXPECT_LE(cumulative, 10.0);
}
