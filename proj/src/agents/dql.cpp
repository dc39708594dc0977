#include "teleran/agents/dql.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

namespace teleran::agents {

void DqlConfig::validate() const {
  if (!(discount > 0.0 && discount < 1.0)) throw InputError("dql.discount must be in (0, 1)");
  if (!(learning_rate > 0.0)) throw InputError("dql.learning_rate must be positive");
  if (replay_capacity == 0 || batch_size == 0) throw InputError("dql: replay capacity and batch size must be positive");
  if (batch_size > replay_capacity) throw InputError("dql.batch_size exceeds replay capacity");
  if (target_sync_period == 0) throw InputError("dql.target_sync_period must be positive");
  if (!(epsilon_end >= 0.0 && epsilon_end <= epsilon_start && epsilon_start <= 1.0)) {
    throw InputError("dql: need 0 <= epsilon_end <= epsilon_start <= 1");
  }
  if (!(anneal_fraction > 0.0 && anneal_fraction <= 1.0)) throw InputError("dql.anneal_fraction must be in (0, 1]");
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  require(capacity > 0, "replay buffer: capacity must be positive");
  items_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

double double_q_target(double reward, bool terminal, double discount, std::span<const double> q_online_next,
                       std::span<const double> q_target_next) {
  if (terminal) return reward;
  require(q_online_next.size() == q_target_next.size(), "double_q_target: action count mismatch");
  const std::size_t a = argmax(q_online_next);
  return reward + discount * q_target_next[a];
}

namespace {

std::vector<std::size_t> layer_sizes(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out) {
  std::vector<std::size_t> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

}  // namespace

DqlAgent::DqlAgent(std::size_t state_dim, std::size_t num_actions, DqlConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)),
      online_(layer_sizes(state_dim, cfg_.hidden_layers, num_actions)),
      target_(online_),
      optimizer_(nn::OptimizerConfig{cfg_.optimizer, cfg_.learning_rate}, online_.parameter_count()),
      replay_(cfg_.replay_capacity),
      explore_rng_("agent-exploration", seed),
      replay_rng_("agent-replay", seed),
      grad_(online_.parameter_count(), 0.0) {
  cfg_.validate();
  sim::RngStream init_rng("nn-init", seed);
  online_.init_uniform(init_rng);
  target_ = online_;
}

double DqlAgent::epsilon() const {
  const double horizon = cfg_.anneal_fraction * static_cast<double>(cfg_.total_training_steps);
  if (horizon <= 0.0 || static_cast<double>(schedule_steps_) >= horizon) return cfg_.epsilon_end;
  const double frac = static_cast<double>(schedule_steps_) / horizon;
  return std::max(cfg_.epsilon_end, cfg_.epsilon_start - (cfg_.epsilon_start - cfg_.epsilon_end) * frac);
}

int DqlAgent::select_action(std::span<const double> state, bool explore) {
  require(state.size() == state_dim(), "dql_act: state dimension mismatch");
  if (explore && explore_rng_.uniform() < epsilon()) {
    return static_cast<int>(explore_rng_.index(num_actions()));
  }
  const auto q = online_.forward(state);
  return static_cast<int>(argmax(q));
}

double DqlAgent::train_step(std::span<const Transition* const> batch) {
  require(!batch.empty(), "dql_train_step: empty batch");
  std::fill(grad_.begin(), grad_.end(), 0.0);
  const double n = static_cast<double>(batch.size());
  double loss = 0.0;
  std::vector<double> upstream(num_actions(), 0.0);
  for (const Transition* t : batch) {
    double y = t->reward;
    if (!t->terminal) {
      const auto q_online_next = online_.forward(t->next_state);
      const auto q_target_next = target_.forward(t->next_state);
      y = double_q_target(t->reward, false, cfg_.discount, q_online_next, q_target_next);
    }
    const auto q = online_.forward(t->state, tape_);
    const auto a = static_cast<std::size_t>(t->action);
    require(a < num_actions(), "dql_train_step: action out of range");
    const double err = q[a] - y;
    loss += err * err / n;
    std::fill(upstream.begin(), upstream.end(), 0.0);
    upstream[a] = 2.0 * err / n;
    online_.backward(tape_, upstream, grad_);
  }
  nn::apply_update(online_, grad_, optimizer_);
  ++gradient_steps_;
  if (gradient_steps_ % cfg_.target_sync_period == 0) sync_target();
  return loss;
}

std::optional<double> DqlAgent::maybe_train() {
  const std::size_t needed = std::max(cfg_.warmup_transitions, cfg_.batch_size);
  if (replay_.size() < needed) return std::nullopt;
  std::vector<const Transition*> batch(cfg_.batch_size);
  for (auto& slot : batch) slot = &replay_[replay_rng_.index(replay_.size())];
  return train_step(batch);
}

DqlPolicy::DqlPolicy(std::size_t state_dim, DqlConfig cfg, std::uint64_t seed)
    : agent_(state_dim, app::kNumModes, std::move(cfg), seed) {}

SegmentationMode DqlPolicy::act(const StateVector& state, const DecisionContext&, bool explore) {
  return mode_of(agent_.select_action(state, explore));
}

void DqlPolicy::end_tick() {
  agent_.advance_schedule();
  agent_.maybe_train();
}

std::unique_ptr<Policy> DqlPolicy::frozen_copy() const {
  DqlConfig cfg = agent_.config();
  cfg.replay_capacity = 1;
  cfg.batch_size = 1;
  auto copy = std::make_unique<DqlPolicy>(agent_.state_dim(), cfg, 0);
  copy->agent().online() = agent_.online();
  copy->agent().target() = agent_.target();
  return copy;
}

std::uint64_t DqlPolicy::parameter_checksum() const { return agent_.online().checksum(); }

void DqlPolicy::save(const std::filesystem::path& dir) const {
  nn::save_checkpoint(dir / "dql_online.ckpt", agent_.online());
  nn::save_checkpoint(dir / "dql_target.ckpt", agent_.target());
  const auto& c = agent_.config();
  nlohmann::ordered_json manifest;
  manifest["policy"] = "DQL";
  manifest["state_dim"] = agent_.state_dim();
  manifest["num_actions"] = agent_.num_actions();
  manifest["hyperparameters"] = {{"hidden_layers", c.hidden_layers},
                                 {"discount", c.discount},
                                 {"learning_rate", c.learning_rate},
                                 {"replay_capacity", c.replay_capacity},
                                 {"batch_size", c.batch_size},
                                 {"target_sync_period", c.target_sync_period},
                                 {"warmup_transitions", c.warmup_transitions},
                                 {"epsilon_start", c.epsilon_start},
                                 {"epsilon_end", c.epsilon_end},
                                 {"anneal_fraction", c.anneal_fraction},
                                 {"total_training_steps", c.total_training_steps}};
  manifest["training_steps"] = agent_.schedule_steps();
  manifest["gradient_steps"] = agent_.gradient_steps();
  manifest["checkpoints"] = {{"online", "dql_online.ckpt"}, {"target", "dql_target.ckpt"}};
  std::ofstream out(dir / "agent_manifest.json");
  if (!out) throw InputError("cannot write agent manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
}

}  // namespace teleran::agents
