// Acceptance runner. Usage: acceptance <P1..P9|all>
// Prints one "P<n> PASS|FAIL ..." line per criterion and exits non-zero when
// any requested criterion fails. Campaign outputs are kept under
// $TELERAN_ACCEPTANCE_DIR (default ./acceptance_runs) for inspection.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "teleran/agents/baselines.hpp"
#include "teleran/agents/dql.hpp"
#include "teleran/agents/ppo.hpp"
#include "teleran/harness/campaign.hpp"
#include "teleran/harness/config.hpp"
#include "teleran/harness/episode.hpp"
#include "teleran/metrics/kpi.hpp"
#include "teleran/metrics/state.hpp"
#include "teleran/nn/dense_net.hpp"
#include "teleran/ran/mcs_table.hpp"
#include "teleran/sim/rng.hpp"
#include "toy_mdp.hpp"

namespace fs = std::filesystem;
using namespace teleran;
using harness::PolicyKind;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::vector<std::string> failures;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failures.push_back(what);
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

fs::path runs_root() {
  const char* env = std::getenv("TELERAN_ACCEPTANCE_DIR");
  return env ? fs::path(env) : fs::current_path() / "acceptance_runs";
}

std::size_t worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

harness::CampaignOutputs campaign(const std::string& tag, PolicyKind policy, std::size_t n_u,
                                  harness::Profile profile = harness::Profile::kFull,
                                  metrics::StateConfig state = metrics::StateConfig::kFull) {
  auto cfg = harness::preset(profile == harness::Profile::kSmoke ? "smoke" : "default");
  cfg.policy = policy;
  cfg.num_vehicles = n_u;
  cfg.state_config = state;
  cfg.radio.tx_power_dbm = 30.0;
  cfg.workers = worker_count();
  const fs::path dir = runs_root() / tag;
  fs::remove_all(dir);
  std::cerr << "[" << tag << "] " << harness::policy_name(policy) << " N_u=" << n_u << " state "
            << metrics::state_config_name(state) << " (train " << cfg.train_episodes() << ", test "
            << cfg.test_episodes() << ")\n";
  return harness::run_campaign(cfg, dir, &std::cerr);
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

// ---------------------------------------------------------------------------

Outcome p1_formulas() {
  Outcome o;
  const auto t0 = Clock::now();
  metrics::KpiThresholds thr;
  o.check(metrics::prp(90, 100) == 0.9, "prp(90,100)");
  o.check(metrics::prp(0, 100) == 0.0, "prp(0,100)");
  o.check(metrics::prp(0, 0) == 1.0, "prp(0,0)");
  o.check(metrics::qos(0.040, 1.0, thr) == 1, "qos(0.040,1.0)");
  o.check(metrics::qos(0.060, 1.0, thr) == 0, "qos(0.060,1.0)");
  o.check(metrics::qos(0.040, 0.99, thr) == 0, "qos(0.040,0.99)");
  o.check(metrics::chamfer_distance({{0, 0, 0}, {1, 2, 3}}, {{0, 0, 0}, {1, 2, 3}}) == 0.0, "cd identical");
  o.check(metrics::chamfer_distance({{0, 0, 0}}, {{1, 0, 0}}) == 2.0, "cd single points");
  o.check(metrics::chamfer_distance({{0, 0, 0}, {2, 0, 0}}, {{1, 0, 0}}) == 3.0, "cd two-to-one");
  o.check(metrics::qoe(0.0, thr) == 1.0, "qoe(0)");
  o.check(metrics::qoe(45.0, thr) == 0.0, "qoe(45)");
  o.check(metrics::qoe(22.5, thr) == 0.5, "qoe(22.5)");
  o.check(metrics::reward(0.010, 0, 0.9, thr) == 0.0, "reward qos=0");
  o.check(metrics::reward(0.010, 1, 0.7, thr) == 0.7, "reward alpha=1");
  auto half = thr;
  half.alpha = 0.5;
  o.check(std::abs(metrics::reward(0.025, 1, 0.8, half) - 0.65) < 1e-15, "reward alpha=0.5");
  metrics::StepObservation obs;
  o.check(metrics::assemble_state(obs, {}, metrics::StateConfig::kApp, {}).size() == 5, "APP dim 5");
  o.check(metrics::assemble_state(obs, {}, metrics::StateConfig::kFull, {}).size() == 18, "FULL dim 18");
  const auto app_net = metrics::assemble_state(obs, {}, metrics::StateConfig::kAppNet, {});
  o.check(std::all_of(app_net.begin() + 5, app_net.end(), [](double x) { return x == 0.0; }), "APP_NET no peers");
  const double t = seconds_since(t0);
  o.check(t < 1.0, "runtime < 1 s");
  o.detail << "18 examples, " << fmt(t * 1e3, 2) << " ms";
  return o;
}

Outcome p2_gradients() {
  Outcome o;
  const auto t0 = Clock::now();
  sim::RngStream rng("acceptance-fd", 1);
  const double h = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t in = 1 + rng.index(18), h1 = 1 + rng.index(16), h2 = 1 + rng.index(8), out = 1 + rng.index(3);
    nn::DenseNet net({in, h1, h2, out});
    net.init_uniform(rng);
    std::vector<double> x(in), u(out);
    for (auto& v : x) v = rng.uniform(-1, 1);
    for (auto& v : u) v = rng.uniform(-1, 1);
    nn::DenseNet::Tape tape;
    net.forward(x, tape);
    std::vector<double> g(net.parameter_count(), 0.0);
    net.backward(tape, u, g);
    auto loss = [&](const nn::DenseNet& n) {
      const auto y = n.forward(x);
      double s = 0.0;
      for (std::size_t k = 0; k < y.size(); ++k) s += y[k] * u[k];
      return s;
    };
    for (std::size_t p = 0; p < net.parameter_count(); ++p) {
      auto plus = net, minus = net;
      plus.parameters()[p] += h;
      minus.parameters()[p] -= h;
      const double numeric = (loss(plus) - loss(minus)) / (2 * h);
      const double scale = std::max({std::abs(g[p]), std::abs(numeric), 1e-3});
      worst = std::max(worst, std::abs(g[p] - numeric) / scale);
    }
  }
  const double t = seconds_since(t0);
  o.check(worst < 1e-4, "max relative error < 1e-4");
  o.check(t < 10.0, "runtime < 10 s");
  o.detail << "max rel err " << std::scientific << std::setprecision(2) << worst << std::defaultfloat << ", "
           << fmt(t, 2) << " s";
  return o;
}

Outcome p3_rl_oracles() {
  Outcome o;
  const auto t0 = Clock::now();
  const std::vector<double> online{0.2, 0.5, 0.1}, target{0.0, 0.4, 0.0};
  o.check(std::abs(agents::double_q_target(1.0, false, 0.95, online, target) - 1.38) < 1e-9, "double-Q 1.38");
  o.check(std::abs(agents::double_q_target(0.7, true, 0.95, online, target) - 0.7) < 1e-9, "double-Q terminal");
  o.check(std::abs(agents::clipped_surrogate(1.5, 1.0, 0.2) - 1.2) < 1e-9, "clip 1.5 -> 1.2");
  o.check(std::abs(agents::clipped_surrogate(1.0, 0.37, 0.2) - 0.37) < 1e-9, "ratio 1 identity");

  const auto q_star = toy::value_iteration(0.95);
  int dql_ok = 0;
  const std::uint64_t seeds[] = {1, 2, 3};
  for (auto seed : seeds) {
    const auto agent = toy::train_dql(seed);
    bool all = true;
    for (int s = 0; s < toy::kStates; ++s) {
      const auto q = agent.q_values(toy::encode(s));
      const std::vector<double> qs(q_star[static_cast<std::size_t>(s)].begin(), q_star[static_cast<std::size_t>(s)].end());
      all &= agents::argmax(q) == agents::argmax(qs);
    }
    dql_ok += all;
  }
  o.check(dql_ok == 3, "DQL greedy policy equals value-iteration optimum");

  const double optimal = toy::optimal_return(toy::kHorizon);
  double worst_ppo = optimal;
  for (auto seed : seeds) {
    auto agent = toy::train_ppo(seed);
    const double ret = toy::rollout_return(
        [&](const std::vector<double>& x) { return agent.select_action(x, false); }, toy::kHorizon);
    worst_ppo = std::min(worst_ppo, ret);
  }
  o.check(worst_ppo >= 0.95 * optimal, "PPO >= 95% of optimal return");
  const double t = seconds_since(t0);
  o.check(t < 120.0, "runtime < 2 min");
  o.detail << "DQL optimal on " << dql_ok << "/3 seeds, PPO worst return " << worst_ppo << "/" << optimal << ", "
           << fmt(t, 1) << " s";
  return o;
}

Outcome p4_conservation() {
  Outcome o;
  const auto t0 = Clock::now();
  sim::RngStream rng("acceptance-p4", 1);
  const PolicyKind kinds[] = {PolicyKind::kConstantR, PolicyKind::kConstantSC, PolicyKind::kConstantSA,
                              PolicyKind::kDelayHeuristic, PolicyKind::kDql, PolicyKind::kPpo};
  int conserved = 0, ledgers = 0;
  for (int e = 0; e < 20; ++e) {
    harness::ExperimentConfig cfg;
    cfg.policy = kinds[rng.index(6)];
    cfg.num_vehicles = 1 + rng.index(10);
    cfg.radio.tx_power_dbm = rng.index(2) ? 30.0 : 23.0;
    auto policy = harness::make_policy(cfg, rng.next_u64());
    const bool train = harness::is_learning(cfg.policy) && rng.index(2) == 0;
    const auto r = harness::run_episode(cfg, *policy, train, 0, rng.next_u64());
    for (const auto& b : r.bytes) {
      ++ledgers;
      conserved += b.conserved();
    }
  }
  o.check(conserved == ledgers, "byte conservation on every vehicle of 20 episodes");

  auto cfg = harness::preset("default");
  cfg.policy = PolicyKind::kDql;
  cfg.num_vehicles = 3;
  cfg.episode_duration_s = 20.0;
  cfg.train_episodes_override = 3;
  cfg.test_episodes_override = 4;
  cfg.dql.warmup_transitions = 100;
  cfg.workers = worker_count();
  const auto dir = runs_root() / "P4_replay";
  fs::remove_all(dir);
  harness::run_campaign(cfg, dir);
  const auto report = harness::replay_check(dir);
  o.check(report.identical(), "replay-check zero diff");
  const double t = seconds_since(t0);
  o.check(t < 120.0, "runtime < 2 min");
  o.detail << conserved << "/" << ledgers << " ledgers conserved, replay compared " << report.compared.size()
           << " files, " << report.differing.size() << " differing, " << fmt(t, 1) << " s";
  return o;
}

Outcome p5_load() {
  Outcome o;
  const auto t0 = Clock::now();
  const app::SegmentationProfile profile;
  const app::AppConfig app_cfg;
  const double fps = 1.0 / app_cfg.frame_period.seconds();
  const double expect_mbps[] = {2.0, 1.0, 0.18};
  for (std::size_t m = 0; m < app::kNumModes; ++m) {
    for (std::size_t n : {1u, 5u, 10u}) {
      const double offered = static_cast<double>(n) * profile.modes[m].frame_bytes * fps / 1e6;
      o.check(std::abs(offered - n * expect_mbps[m]) < 1e-9, "offered load identity");
    }
  }
  // Capacity of the full carrier under the default table, for reference.
  const ran::RanConfig ran_cfg;
  const channel::RadioConfig radio;
  const double offered_bps = 10 * 2e6 * 8;
  double crossover_db = -1e9;
  for (double snr = -5.0; snr <= 30.0; snr += 0.01) {
    const auto sel = ran_cfg.mcs_table.select(snr);
    const double cap = ran::link_rate_bps(radio.bandwidth_hz, sel.efficiency, ran_cfg.mcs_table.efficiency_overhead());
    if (cap < offered_bps) crossover_db = snr;
  }

  const auto congested = campaign("P5_CR_nu10", PolicyKind::kConstantR, 10);
  const auto single = campaign("P5_CR_nu1", PolicyKind::kConstantR, 1);
  o.check(congested.test_mean_qos < 0.1, "C-R QoS at N_u=10 < 0.1");
  o.check(single.test_mean_qos > 0.6, "C-R QoS at N_u=1 > 0.6");
  const double t = seconds_since(t0);
  o.check(t < 600.0, "runtime < 10 min");
  o.detail << "C-R QoS N_u=10 " << fmt(congested.test_mean_qos) << " (" << congested.test_episodes
           << " eps), N_u=1 " << fmt(single.test_mean_qos) << " (" << single.test_episodes
           << " eps); 160 Mbit/s exceeds capacity below " << fmt(crossover_db, 2) << " dB; " << fmt(t, 0) << " s";
  return o;
}

Outcome p6_ordering() {
  Outcome o;
  const auto t0 = Clock::now();
  std::map<std::string, harness::CampaignOutputs> r;
  for (auto [kind, name] : {std::pair{PolicyKind::kConstantR, "CR"}, std::pair{PolicyKind::kConstantSC, "CSC"},
                            std::pair{PolicyKind::kConstantSA, "CSA"}}) {
    r[std::string(name) + "10"] = campaign(std::string("P6_") + name + "_nu10", kind, 10);
    r[std::string(name) + "1"] = campaign(std::string("P6_") + name + "_nu1", kind, 1);
  }
  const double sa = r["CSA10"].test_mean_qos, sc = r["CSC10"].test_mean_qos, raw = r["CR10"].test_mean_qos;
  o.check(sa - sc >= 0.05, "QoS(C-SA) - QoS(C-SC) >= 0.05 at N_u=10");
  o.check(sc - raw >= 0.05, "QoS(C-SC) - QoS(C-R) >= 0.05 at N_u=10");
  const double qr = r["CR1"].test_mean_qoe, qsc = r["CSC1"].test_mean_qoe, qsa = r["CSA1"].test_mean_qoe;
  o.check(qr >= qsc && qsc >= qsa, "QoE(C-R) >= QoE(C-SC) >= QoE(C-SA) at N_u=1");
  const double t = seconds_since(t0);
  o.check(t < 900.0, "runtime < 15 min");
  o.detail << "QoS N_u=10 SA/SC/R " << fmt(sa) << "/" << fmt(sc) << "/" << fmt(raw) << "; QoE N_u=1 R/SC/SA "
           << fmt(qr) << "/" << fmt(qsc) << "/" << fmt(qsa) << "; " << fmt(t, 0) << " s";
  return o;
}

Outcome p7_learning() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto smoke = harness::Profile::kSmoke;
  std::map<std::string, double> reward;
  for (auto [kind, name] : {std::pair{PolicyKind::kConstantR, "C-R"}, std::pair{PolicyKind::kConstantSC, "C-SC"},
                            std::pair{PolicyKind::kConstantSA, "C-SA"}, std::pair{PolicyKind::kDelayHeuristic, "D-S"},
                            std::pair{PolicyKind::kPpo, "PPO"}, std::pair{PolicyKind::kDql, "DQL"}}) {
    reward[name] = campaign(std::string("P7_") + name, kind, 5, smoke).test_mean_reward;
  }
  const double best_constant = std::max({reward["C-R"], reward["C-SC"], reward["C-SA"]});
  const double best_static = std::max(best_constant, reward["D-S"]);
  o.check(reward["PPO"] >= 1.05 * best_static, "PPO >= 1.05 x max(C-R, C-SC, C-SA, D-S)");
  o.check(reward["DQL"] >= 0.95 * best_constant, "DQL >= 0.95 x best constant");
  const double t = seconds_since(t0);
  o.check(t < 3600.0, "runtime <= 1 h");
  o.detail << "C-R " << fmt(reward["C-R"]) << " C-SC " << fmt(reward["C-SC"]) << " C-SA " << fmt(reward["C-SA"])
           << " D-S " << fmt(reward["D-S"]) << " PPO " << fmt(reward["PPO"]) << " DQL " << fmt(reward["DQL"]) << "; "
           << fmt(t, 0) << " s";
  return o;
}

Outcome p8_state_space() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto smoke = harness::Profile::kSmoke;
  const double full = campaign("P8_FULL", PolicyKind::kPpo, 5, smoke, metrics::StateConfig::kFull).test_mean_reward;
  const double phy_net =
      campaign("P8_PHY_NET", PolicyKind::kPpo, 5, smoke, metrics::StateConfig::kPhyNet).test_mean_reward;
  const double app = campaign("P8_APP", PolicyKind::kPpo, 5, smoke, metrics::StateConfig::kApp).test_mean_reward;
  o.check(full >= phy_net, "FULL >= PHY_NET");
  o.check(phy_net >= app, "PHY_NET >= APP");
  o.check(full - app >= 0.05, "FULL - APP >= 0.05");
  const double t = seconds_since(t0);
  o.check(t < 7200.0, "runtime <= 2 h");
  o.detail << "PPO smoke reward FULL " << fmt(full) << " PHY_NET " << fmt(phy_net) << " APP " << fmt(app)
           << "; " << fmt(t, 0) << " s";
  return o;
}

Outcome p9_heuristic() {
  Outcome o;
  const auto t0 = Clock::now();
  std::vector<double> script;
  script.insert(script.end(), 10, 0.030);
  script.insert(script.end(), 5, 0.080);
  script.insert(script.end(), 20, 0.020);
  agents::DelayHeuristicPolicy policy(agents::HeuristicParams{});
  policy.begin_episode(1);
  auto mode = app::SegmentationMode::kRaw;
  int up = 0, down = 0, other = 0;
  std::ostringstream trace;
  for (std::size_t k = 0; k < script.size(); ++k) {
    metrics::StepObservation obs;
    obs.app.delay_mean_s = script[k];
    agents::DecisionContext ctx{0, mode, &obs};
    const auto next = policy.act({}, ctx, false);
    if (next != mode) {
      if (mode == app::SegmentationMode::kRaw && next == app::SegmentationMode::kConservative) ++up;
      else if (mode == app::SegmentationMode::kConservative && next == app::SegmentationMode::kRaw) ++down;
      else ++other;
      trace << " " << app::mode_name(mode) << "->" << app::mode_name(next) << "@" << k;
    }
    mode = next;
  }
  o.check(up == 1, "R->SC exactly once");
  o.check(down == 1, "SC->R exactly once");
  o.check(other == 0, "no other transitions");
  const double t = seconds_since(t0);
  o.check(t < 1.0, "runtime < 1 s");
  o.detail << "transitions:" << trace.str();
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::function<Outcome()>> criteria{
      {"P1", p1_formulas},   {"P2", p2_gradients},  {"P3", p3_rl_oracles},
      {"P4", p4_conservation}, {"P5", p5_load},      {"P6", p6_ordering},
      {"P7", p7_learning},   {"P8", p8_state_space}, {"P9", p9_heuristic}};
  std::vector<std::string> wanted;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "all") {
      for (const auto& [name, fn] : criteria) wanted.push_back(name);
    } else if (criteria.count(arg)) {
      wanted.push_back(arg);
    } else {
      std::cerr << "unknown criterion '" << arg << "' (expected P1..P9 or all)\n";
      return 2;
    }
  }
  if (wanted.empty()) {
    std::cerr << "usage: acceptance <P1..P9|all>...\n";
    return 2;
  }
  bool all_pass = true;
  for (const auto& name : wanted) {
    Outcome o;
    try {
      o = criteria.at(name)();
    } catch (const std::exception& e) {
      o.pass = false;
      o.failures.push_back(std::string("exception: ") + e.what());
    }
    std::cout << name << (o.pass ? " PASS " : " FAIL ") << o.detail.str();
    if (!o.pass) {
      std::cout << " | failed:";
      for (const auto& f : o.failures) std::cout << " [" << f << "]";
    }
    std::cout << std::endl;
    all_pass &= o.pass;
  }
  return all_pass ? 0 : 1;
}
