#include "teleran/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

namespace teleran::harness {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
  return out;
}

// Reads keys of one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& root, std::string name) : name_(std::move(name)) {
    if (!root.contains(name_)) return;
    node_ = &root.at(name_);
    if (!node_->is_object()) throw InputError("config: '" + name_ + "' must be an object");
  }
  Section(const json* node, std::string name) : name_(std::move(name)), node_(node) {
    if (node_ && !node_->is_object()) throw InputError("config: '" + name_ + "' must be an object");
  }

  const json* find(const char* key) {
    seen_.insert(key);
    if (!node_ || !node_->contains(key)) return nullptr;
    return &node_->at(key);
  }

  template <class T>
  void get(const char* key, T& out) {
    const json* v = find(key);
    if (!v) return;
    try {
      out = v->get<T>();
    } catch (const json::exception&) {
      throw InputError("config: bad value for '" + name_ + "." + key + "': " + v->dump());
    }
  }

  void seconds(const char* key, SimTime& out) {
    double s = out.seconds();
    get(key, s);
    out = SimTime::from_seconds(s);
  }

  std::string path(const char* key) const { return name_ + "." + key; }

  void finish() const {
    if (!node_) return;
    for (const auto& [k, v] : node_->items()) {
      if (!seen_.count(k)) throw InputError("config: unknown key '" + name_ + "." + k + "'");
    }
  }

 private:
  std::string name_;
  const json* node_ = nullptr;
  std::set<std::string> seen_;
};

template <class Parse, class T>
void get_enum(Section& s, const char* key, T& out, Parse parse) {
  if (const json* v = s.find(key)) {
    if (!v->is_string()) throw InputError("config: '" + s.path(key) + "' must be a string");
    try {
      out = parse(v->get<std::string>());
    } catch (const InputError& e) {
      throw InputError("config: '" + s.path(key) + "': " + e.what());
    }
  }
}

std::string_view statistic_name(metrics::DelayStatistic s) {
  return s == metrics::DelayStatistic::kMean ? "mean" : "max";
}

metrics::DelayStatistic parse_statistic(std::string_view s) {
  if (s == "mean") return metrics::DelayStatistic::kMean;
  if (s == "max") return metrics::DelayStatistic::kMax;
  throw InputError("delay statistic must be 'mean' or 'max', got '" + std::string(s) + "'");
}

std::string_view optimizer_name(nn::OptimizerKind k) { return k == nn::OptimizerKind::kAdam ? "adam" : "sgd"; }

nn::OptimizerKind parse_optimizer(std::string_view s) {
  if (s == "adam") return nn::OptimizerKind::kAdam;
  if (s == "sgd") return nn::OptimizerKind::kSgd;
  throw InputError("optimizer must be 'adam' or 'sgd', got '" + std::string(s) + "'");
}

void set_dotted(json& root, std::string_view dotted, json value) {
  json* node = &root;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    const std::string part(dotted.substr(start, dot == std::string_view::npos ? dotted.npos : dot - start));
    if (part.empty()) throw InputError("override: malformed key '" + std::string(dotted) + "'");
    if (dot == std::string_view::npos) {
      (*node)[part] = std::move(value);
      return;
    }
    if (!node->contains(part) || !(*node)[part].is_object()) {
      throw InputError("override: unknown section in '" + std::string(dotted) + "'");
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

}  // namespace

std::string_view policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kConstantR: return "C-R";
    case PolicyKind::kConstantSC: return "C-SC";
    case PolicyKind::kConstantSA: return "C-SA";
    case PolicyKind::kDelayHeuristic: return "D-S";
    case PolicyKind::kDql: return "DQL";
    case PolicyKind::kPpo: return "PPO";
  }
  return "?";
}

PolicyKind parse_policy(std::string_view name) {
  const auto u = upper(name);
  for (auto k : {PolicyKind::kConstantR, PolicyKind::kConstantSC, PolicyKind::kConstantSA, PolicyKind::kDelayHeuristic,
                 PolicyKind::kDql, PolicyKind::kPpo}) {
    if (u == policy_name(k)) return k;
  }
  throw InputError("unknown policy '" + std::string(name) + "' (expected C-R, C-SC, C-SA, D-S, DQL or PPO)");
}

bool is_learning(PolicyKind kind) { return kind == PolicyKind::kDql || kind == PolicyKind::kPpo; }

std::string_view profile_name(Profile p) { return p == Profile::kFull ? "full" : "smoke"; }

Profile parse_profile(std::string_view name) {
  if (name == "full") return Profile::kFull;
  if (name == "smoke") return Profile::kSmoke;
  throw InputError("unknown profile '" + std::string(name) + "' (expected full or smoke)");
}

std::size_t ExperimentConfig::train_episodes() const {
  if (!is_learning(policy)) return 0;
  if (train_episodes_override > 0) return train_episodes_override;
  if (profile == Profile::kSmoke) return kSmokeTrainEpisodes;
  return std::max<std::size_t>(1, 10'000 / num_vehicles);
}

std::size_t ExperimentConfig::test_episodes() const {
  if (test_episodes_override > 0) return test_episodes_override;
  return std::max<std::size_t>(1, 500 / num_vehicles);
}

std::uint64_t ExperimentConfig::ticks_per_episode() const {
  return static_cast<std::uint64_t>(episode_duration().micros() / update_period().micros());
}

void ExperimentConfig::validate() const {
  if (num_vehicles == 0) throw InputError("config: experiment.num_vehicles must be positive");
  if (!(episode_duration_s > 0.0)) throw InputError("config: experiment.episode_duration_s must be positive");
  if (!(update_period_s > 0.0)) throw InputError("config: experiment.update_period_s must be positive");
  if (episode_duration().micros() % update_period().micros() != 0) {
    throw InputError("config: experiment.episode_duration_s must be a multiple of update_period_s");
  }
  if (workers == 0) throw InputError("config: experiment.workers must be positive");
  if (!(app.frame_period > SimTime{})) throw InputError("config: app.frame_period_s must be positive");
  if (app.pdu_payload_bytes == 0) throw InputError("config: app.pdu_payload_bytes must be positive");
  if (!(ran.tti > SimTime{})) throw InputError("config: ran.tti_s must be positive");
  if (ran.core_network_delay < SimTime{}) throw InputError("config: ran.core_network_delay_s must be >= 0");
  if (update_period().micros() % ran.tti.micros() != 0) {
    throw InputError("config: experiment.update_period_s must be a multiple of ran.tti_s");
  }
  if (!(mobility.update_period > SimTime{})) throw InputError("config: mobility.update_period_s must be positive");
  if (!(mobility.speed_min_mps >= 0.0 && mobility.speed_min_mps <= mobility.speed_max_mps)) {
    throw InputError("config: mobility speeds need 0 <= speed_min_mps <= speed_max_mps");
  }
  if (!(mobility.bounds.x_min < mobility.bounds.x_max && mobility.bounds.y_min < mobility.bounds.y_max)) {
    throw InputError("config: mobility bounds are empty");
  }
  radio.validate();
  thresholds.validate();
  segmentation.validate(thresholds.cd_max);
  heuristic.validate();
  dql.validate();
  ppo.validate();
}

ordered_json to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["experiment"] = {{"num_vehicles", c.num_vehicles},
                     {"policy", policy_name(c.policy)},
                     {"state_config", metrics::state_config_name(c.state_config)},
                     {"seed", c.seed},
                     {"episode_duration_s", c.episode_duration_s},
                     {"update_period_s", c.update_period_s},
                     {"profile", profile_name(c.profile)},
                     {"train_episodes", c.train_episodes_override},
                     {"test_episodes", c.test_episodes_override},
                     {"workers", c.workers},
                     {"write_ticks", c.write_ticks},
                     {"initial_mode", app::mode_name(c.initial_mode)}};
  const auto& r = c.radio;
  j["radio"] = {{"carrier_frequency_hz", r.carrier_frequency_hz},
                {"bandwidth_hz", r.bandwidth_hz},
                {"tx_power_dbm", r.tx_power_dbm},
                {"allowed_tx_powers_dbm", r.allowed_tx_powers_dbm},
                {"noise_figure_db", r.noise_figure_db},
                {"pathloss_exponent", r.pathloss_exponent},
                {"reference_loss_db", r.reference_loss_db},
                {"shadowing_stddev_db", r.shadowing_stddev_db},
                {"shadowing_correlation_m", r.shadowing_correlation_m},
                {"fading_jitter_db", r.fading_jitter_db}};
  const auto& m = c.mobility;
  j["mobility"] = {{"x_min", m.bounds.x_min},
                   {"x_max", m.bounds.x_max},
                   {"y_min", m.bounds.y_min},
                   {"y_max", m.bounds.y_max},
                   {"speed_min_mps", m.speed_min_mps},
                   {"speed_max_mps", m.speed_max_mps},
                   {"heading_jitter", m.heading_jitter},
                   {"update_period_s", m.update_period.seconds()}};
  ordered_json table = ordered_json::array();
  for (const auto& e : c.ran.mcs_table.entries()) {
    table.push_back({{"min_snr_db", e.min_snr_db}, {"efficiency", e.efficiency}, {"index", e.index}});
  }
  j["ran"] = {{"buffer_capacity_bytes", c.ran.buffer_capacity_bytes},
              {"tti_s", c.ran.tti.seconds()},
              {"core_network_delay_s", c.ran.core_network_delay.seconds()},
              {"snr_over_allocated_bandwidth", c.ran.snr_over_allocated_bandwidth},
              {"mcs_efficiency_overhead", c.ran.mcs_table.efficiency_overhead()},
              {"mcs_outage_threshold_db", c.ran.mcs_table.outage_threshold_db()}};
  j["mcs_table"] = table;
  j["app"] = {{"pdu_payload_bytes", c.app.pdu_payload_bytes},
              {"frame_period_s", c.app.frame_period.seconds()},
              {"empty_window_delay_s", c.app.empty_window_delay_s}};
  ordered_json seg;
  for (auto mode : app::kAllModes) {
    const auto& p = c.segmentation[mode];
    seg[std::string(app::mode_name(mode))] = {{"frame_bytes", p.frame_bytes},
                                              {"chamfer_distance", p.chamfer_distance},
                                              {"encode_delay_s", p.encode_delay.seconds()},
                                              {"decode_delay_s", p.decode_delay.seconds()}};
  }
  j["segmentation"] = seg;
  j["thresholds"] = {{"delay_max_s", c.thresholds.delay_max_s},
                     {"prp_min", c.thresholds.prp_min},
                     {"cd_max", c.thresholds.cd_max},
                     {"alpha", c.thresholds.alpha},
                     {"qos_delay_statistic", statistic_name(c.delay_statistic)}};
  j["heuristic"] = {{"upper_threshold_s", c.heuristic.upper_threshold_s},
                    {"lower_threshold_s", c.heuristic.lower_threshold_s},
                    {"smoothing", c.heuristic.smoothing}};
  const auto& d = c.dql;
  j["dql"] = {{"hidden_layers", d.hidden_layers},
              {"discount", d.discount},
              {"learning_rate", d.learning_rate},
              {"optimizer", optimizer_name(d.optimizer)},
              {"replay_capacity", d.replay_capacity},
              {"batch_size", d.batch_size},
              {"target_sync_period", d.target_sync_period},
              {"warmup_transitions", d.warmup_transitions},
              {"epsilon_start", d.epsilon_start},
              {"epsilon_end", d.epsilon_end},
              {"anneal_fraction", d.anneal_fraction}};
  const auto& p = c.ppo;
  j["ppo"] = {{"hidden_layers", p.hidden_layers},
              {"discount", p.discount},
              {"gae_lambda", p.gae_lambda},
              {"actor_learning_rate", p.actor_learning_rate},
              {"critic_learning_rate", p.critic_learning_rate},
              {"epochs", p.epochs},
              {"minibatch_size", p.minibatch_size},
              {"clip", p.clip},
              {"entropy_coef", p.entropy_coef},
              {"normalize_advantages", p.normalize_advantages},
              {"episodes_per_update", p.episodes_per_update}};
  j["traces"] = {{"channel", c.channel_trace}, {"frame_size", c.frame_size_trace}};
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw InputError("config: top level must be an object");
  static const std::set<std::string> known{"experiment", "radio", "mobility", "ran", "app", "segmentation",
                                           "thresholds", "heuristic", "dql", "ppo", "traces", "mcs_table"};
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw InputError("config: unknown section '" + k + "'");
  }
  ExperimentConfig c;

  Section e(j, "experiment");
  e.get("num_vehicles", c.num_vehicles);
  get_enum(e, "policy", c.policy, parse_policy);
  get_enum(e, "state_config", c.state_config, metrics::parse_state_config);
  e.get("seed", c.seed);
  e.get("episode_duration_s", c.episode_duration_s);
  e.get("update_period_s", c.update_period_s);
  get_enum(e, "profile", c.profile, parse_profile);
  e.get("train_episodes", c.train_episodes_override);
  e.get("test_episodes", c.test_episodes_override);
  e.get("workers", c.workers);
  e.get("write_ticks", c.write_ticks);
  get_enum(e, "initial_mode", c.initial_mode, app::parse_mode);
  e.finish();

  Section r(j, "radio");
  r.get("carrier_frequency_hz", c.radio.carrier_frequency_hz);
  r.get("bandwidth_hz", c.radio.bandwidth_hz);
  r.get("tx_power_dbm", c.radio.tx_power_dbm);
  r.get("allowed_tx_powers_dbm", c.radio.allowed_tx_powers_dbm);
  r.get("noise_figure_db", c.radio.noise_figure_db);
  r.get("pathloss_exponent", c.radio.pathloss_exponent);
  r.get("reference_loss_db", c.radio.reference_loss_db);
  r.get("shadowing_stddev_db", c.radio.shadowing_stddev_db);
  r.get("shadowing_correlation_m", c.radio.shadowing_correlation_m);
  r.get("fading_jitter_db", c.radio.fading_jitter_db);
  r.finish();

  Section m(j, "mobility");
  m.get("x_min", c.mobility.bounds.x_min);
  m.get("x_max", c.mobility.bounds.x_max);
  m.get("y_min", c.mobility.bounds.y_min);
  m.get("y_max", c.mobility.bounds.y_max);
  m.get("speed_min_mps", c.mobility.speed_min_mps);
  m.get("speed_max_mps", c.mobility.speed_max_mps);
  m.get("heading_jitter", c.mobility.heading_jitter);
  m.seconds("update_period_s", c.mobility.update_period);
  m.finish();

  Section rn(j, "ran");
  rn.get("buffer_capacity_bytes", c.ran.buffer_capacity_bytes);
  rn.seconds("tti_s", c.ran.tti);
  rn.seconds("core_network_delay_s", c.ran.core_network_delay);
  rn.get("snr_over_allocated_bandwidth", c.ran.snr_over_allocated_bandwidth);
  double overhead = c.ran.mcs_table.efficiency_overhead();
  double outage = c.ran.mcs_table.outage_threshold_db();
  rn.get("mcs_efficiency_overhead", overhead);
  rn.get("mcs_outage_threshold_db", outage);
  std::vector<ran::McsEntry> entries = c.ran.mcs_table.entries();
  if (j.contains("mcs_table")) {
    const json* t = &j.at("mcs_table");
    if (!t->is_array()) throw InputError("config: 'mcs_table' must be an array");
    entries.clear();
    for (std::size_t i = 0; i < t->size(); ++i) {
      Section row(&t->at(i), "mcs_table[" + std::to_string(i) + "]");
      ran::McsEntry entry;
      entry.index = static_cast<int>(i);
      row.get("min_snr_db", entry.min_snr_db);
      row.get("efficiency", entry.efficiency);
      row.get("index", entry.index);
      row.finish();
      entries.push_back(entry);
    }
  }
  c.ran.mcs_table = ran::McsTable(std::move(entries), overhead, outage);
  rn.finish();

  Section a(j, "app");
  a.get("pdu_payload_bytes", c.app.pdu_payload_bytes);
  a.seconds("frame_period_s", c.app.frame_period);
  a.get("empty_window_delay_s", c.app.empty_window_delay_s);
  a.finish();

  Section seg(j, "segmentation");
  for (auto mode : app::kAllModes) {
    const std::string name(app::mode_name(mode));
    if (const json* node = seg.find(name.c_str())) {
      Section s(node, "segmentation." + name);
      auto& p = c.segmentation[mode];
      s.get("frame_bytes", p.frame_bytes);
      s.get("chamfer_distance", p.chamfer_distance);
      s.seconds("encode_delay_s", p.encode_delay);
      s.seconds("decode_delay_s", p.decode_delay);
      s.finish();
    }
  }
  seg.finish();

  Section th(j, "thresholds");
  th.get("delay_max_s", c.thresholds.delay_max_s);
  th.get("prp_min", c.thresholds.prp_min);
  th.get("cd_max", c.thresholds.cd_max);
  th.get("alpha", c.thresholds.alpha);
  get_enum(th, "qos_delay_statistic", c.delay_statistic, parse_statistic);
  th.finish();

  Section h(j, "heuristic");
  h.get("upper_threshold_s", c.heuristic.upper_threshold_s);
  h.get("lower_threshold_s", c.heuristic.lower_threshold_s);
  h.get("smoothing", c.heuristic.smoothing);
  h.finish();

  Section d(j, "dql");
  d.get("hidden_layers", c.dql.hidden_layers);
  d.get("discount", c.dql.discount);
  d.get("learning_rate", c.dql.learning_rate);
  get_enum(d, "optimizer", c.dql.optimizer, parse_optimizer);
  d.get("replay_capacity", c.dql.replay_capacity);
  d.get("batch_size", c.dql.batch_size);
  d.get("target_sync_period", c.dql.target_sync_period);
  d.get("warmup_transitions", c.dql.warmup_transitions);
  d.get("epsilon_start", c.dql.epsilon_start);
  d.get("epsilon_end", c.dql.epsilon_end);
  d.get("anneal_fraction", c.dql.anneal_fraction);
  d.finish();

  Section p(j, "ppo");
  p.get("hidden_layers", c.ppo.hidden_layers);
  p.get("discount", c.ppo.discount);
  p.get("gae_lambda", c.ppo.gae_lambda);
  p.get("actor_learning_rate", c.ppo.actor_learning_rate);
  p.get("critic_learning_rate", c.ppo.critic_learning_rate);
  p.get("epochs", c.ppo.epochs);
  p.get("minibatch_size", c.ppo.minibatch_size);
  p.get("clip", c.ppo.clip);
  p.get("entropy_coef", c.ppo.entropy_coef);
  p.get("normalize_advantages", c.ppo.normalize_advantages);
  p.get("episodes_per_update", c.ppo.episodes_per_update);
  p.finish();

  Section t(j, "traces");
  t.get("channel", c.channel_trace);
  t.get("frame_size", c.frame_size_trace);
  t.finish();

  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& err) {
    throw InputError("config " + path.string() + ": " + err.what());
  }
  return config_from_json(j);
}

void save_config(const std::filesystem::path& path, const ExperimentConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << to_json(cfg).dump(2) << '\n';
}

void apply_override(ExperimentConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw InputError("override must look like section.key=value, got '" + std::string(assignment) + "'");
  }
  const auto key = assignment.substr(0, eq);
  const std::string raw(assignment.substr(eq + 1));
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  json j = to_json(cfg);
  set_dotted(j, key, std::move(value));
  cfg = config_from_json(j);
}

ExperimentConfig preset(std::string_view name) {
  ExperimentConfig c;
  if (name == "default") return c;
  if (name == "smoke") {
    c.profile = Profile::kSmoke;
    return c;
  }
  throw InputError("unknown preset '" + std::string(name) + "'");
}

std::unique_ptr<agents::Policy> make_policy(const ExperimentConfig& cfg, std::uint64_t seed) {
  const std::size_t dim = metrics::state_dimension(cfg.state_config);
  switch (cfg.policy) {
    case PolicyKind::kConstantR: return std::make_unique<agents::ConstantPolicy>(app::SegmentationMode::kRaw);
    case PolicyKind::kConstantSC:
      return std::make_unique<agents::ConstantPolicy>(app::SegmentationMode::kConservative);
    case PolicyKind::kConstantSA: return std::make_unique<agents::ConstantPolicy>(app::SegmentationMode::kAggressive);
    case PolicyKind::kDelayHeuristic: return std::make_unique<agents::DelayHeuristicPolicy>(cfg.heuristic);
    case PolicyKind::kDql: {
      agents::DqlConfig d = cfg.dql;
      d.total_training_steps = cfg.train_episodes() * cfg.ticks_per_episode();
      return std::make_unique<agents::DqlPolicy>(dim, d, seed);
    }
    case PolicyKind::kPpo: return std::make_unique<agents::PpoPolicy>(dim, cfg.ppo, seed);
  }
  throw ContractViolation("make_policy: unhandled policy kind");
}

}  // namespace teleran::harness
