#include "teleran/agents/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

namespace teleran::agents {

void PpoConfig::validate() const {
  if (!(discount > 0.0 && discount < 1.0)) throw InputError("ppo.discount must be in (0, 1)");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) throw InputError("ppo.gae_lambda must be in [0, 1]");
  if (!(actor_learning_rate > 0.0 && critic_learning_rate > 0.0)) throw InputError("ppo: learning rates must be positive");
  if (epochs == 0 || minibatch_size == 0) throw InputError("ppo: epochs and minibatch size must be positive");
  if (!(clip > 0.0 && clip < 1.0)) throw InputError("ppo.clip must be in (0, 1)");
  if (!(entropy_coef >= 0.0)) throw InputError("ppo.entropy_coef must be non-negative");
  if (episodes_per_update == 0) throw InputError("ppo.episodes_per_update must be positive");
}

std::vector<double> softmax(std::span<const double> logits) {
  require(!logits.empty(), "softmax: empty input");
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - mx);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double clipped_surrogate(double ratio, double advantage, double clip) {
  const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip);
  return std::min(ratio * advantage, clipped * advantage);
}

bool surrogate_unclipped(double ratio, double advantage, double clip) {
  const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip);
  return ratio * advantage <= clipped * advantage;
}

std::vector<double> compute_gae(std::span<const double> rewards, std::span<const double> values,
                                std::span<const double> next_values, const std::vector<bool>& terminal,
                                double discount, double lambda) {
  const std::size_t n = rewards.size();
  require(values.size() == n && next_values.size() == n && terminal.size() == n, "compute_gae: length mismatch");
  std::vector<double> adv(n, 0.0);
  double running = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    const double cont = terminal[k] ? 0.0 : 1.0;
    const double delta = rewards[k] + discount * cont * next_values[k] - values[k];
    running = delta + discount * lambda * cont * running;
    adv[k] = running;
  }
  return adv;
}

namespace {

std::vector<std::size_t> layer_sizes(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out) {
  std::vector<std::size_t> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

}  // namespace

PpoAgent::PpoAgent(std::size_t state_dim, std::size_t num_actions, PpoConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)),
      actor_(layer_sizes(state_dim, cfg_.hidden_layers, num_actions)),
      critic_(layer_sizes(state_dim, cfg_.hidden_layers, 1)),
      actor_opt_(nn::OptimizerConfig{nn::OptimizerKind::kAdam, cfg_.actor_learning_rate}, actor_.parameter_count()),
      critic_opt_(nn::OptimizerConfig{nn::OptimizerKind::kAdam, cfg_.critic_learning_rate},
                  critic_.parameter_count()),
      action_rng_("agent-exploration", seed),
      shuffle_rng_("agent-replay", seed) {
  cfg_.validate();
  sim::RngStream init_rng("nn-init", seed);
  actor_.init_uniform(init_rng);
  critic_.init_uniform(init_rng);
}

std::vector<double> PpoAgent::action_probabilities(std::span<const double> state) const {
  return softmax(actor_.forward(state));
}

double PpoAgent::value(std::span<const double> state) const { return critic_.forward(state)[0]; }

int PpoAgent::select_action(std::span<const double> state, bool explore) {
  require(state.size() == state_dim(), "ppo_act: state dimension mismatch");
  const auto logits = actor_.forward(state);
  if (!explore) return static_cast<int>(argmax(logits));
  const auto p = softmax(logits);
  double u = action_rng_.uniform();
  for (std::size_t a = 0; a < p.size(); ++a) {
    if (u < p[a]) return static_cast<int>(a);
    u -= p[a];
  }
  return static_cast<int>(p.size() - 1);
}

void PpoAgent::record(std::span<const double> state, int action, double reward, std::span<const double> next_state,
                      bool terminal, std::uint64_t trajectory_id) {
  require(state.size() == state_dim() && next_state.size() == state_dim(), "ppo_record: state dimension mismatch");
  require(action >= 0 && static_cast<std::size_t>(action) < num_actions(), "ppo_record: action out of range");
  PpoSample s;
  s.state.assign(state.begin(), state.end());
  s.action = action;
  s.log_prob = std::log(action_probabilities(state)[static_cast<std::size_t>(action)]);
  s.value = value(state);
  s.next_value = terminal ? 0.0 : value(next_state);
  s.reward = reward;
  s.terminal = terminal;
  trajectories_[trajectory_id].push_back(std::move(s));
}

void PpoAgent::finish_episode() { ++episodes_collected_; }

std::size_t PpoAgent::buffered_samples() const {
  std::size_t n = 0;
  for (const auto& [id, traj] : trajectories_) n += traj.size();
  return n;
}

PpoUpdateStats PpoAgent::update() {
  std::vector<PpoSample> samples;
  for (auto& [id, traj] : trajectories_) {
    std::vector<double> r, v, nv;
    std::vector<bool> term_bits;
    for (const auto& s : traj) {
      r.push_back(s.reward);
      v.push_back(s.value);
      nv.push_back(s.next_value);
      term_bits.push_back(s.terminal);
    }
    const auto adv = compute_gae(r, v, nv, term_bits, cfg_.discount, cfg_.gae_lambda);
    for (std::size_t k = 0; k < traj.size(); ++k) {
      traj[k].advantage = adv[k];
      traj[k].ret = adv[k] + traj[k].value;
      samples.push_back(std::move(traj[k]));
    }
  }
  trajectories_.clear();
  episodes_collected_ = 0;

  PpoUpdateStats stats;
  stats.samples = samples.size();
  if (samples.empty()) return stats;

  if (cfg_.normalize_advantages && samples.size() > 1) {
    double mean = 0.0;
    for (const auto& s : samples) mean += s.advantage;
    mean /= static_cast<double>(samples.size());
    double var = 0.0;
    for (const auto& s : samples) var += (s.advantage - mean) * (s.advantage - mean);
    const double sd = std::sqrt(var / static_cast<double>(samples.size()));
    for (auto& s : samples) s.advantage = sd > 1e-8 ? (s.advantage - mean) / sd : s.advantage - mean;
  }

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> actor_grad(actor_.parameter_count());
  std::vector<double> critic_grad(critic_.parameter_count());
  std::vector<double> upstream(num_actions());
  std::vector<double> critic_up(1);
  nn::DenseNet::Tape actor_tape;
  nn::DenseNet::Tape critic_tape;
  double surrogate_sum = 0.0, entropy_sum = 0.0, critic_sum = 0.0;
  std::size_t counted = 0;

  for (std::size_t epoch = 0; epoch < cfg_.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng_.engine());
    for (std::size_t start = 0; start < order.size(); start += cfg_.minibatch_size) {
      const std::size_t end = std::min(order.size(), start + cfg_.minibatch_size);
      const double m = static_cast<double>(end - start);
      std::fill(actor_grad.begin(), actor_grad.end(), 0.0);
      std::fill(critic_grad.begin(), critic_grad.end(), 0.0);
      for (std::size_t k = start; k < end; ++k) {
        const PpoSample& s = samples[order[k]];
        const auto logits = actor_.forward(s.state, actor_tape);
        const auto p = softmax(logits);
        const auto a = static_cast<std::size_t>(s.action);
        const double ratio = std::exp(std::log(p[a]) - s.log_prob);
        const double h = entropy(p);
        surrogate_sum += clipped_surrogate(ratio, s.advantage, cfg_.clip);
        entropy_sum += h;
        const bool active = surrogate_unclipped(ratio, s.advantage, cfg_.clip);
        for (std::size_t j = 0; j < p.size(); ++j) {
          double g = 0.0;
          if (active) g -= s.advantage * ratio * ((j == a ? 1.0 : 0.0) - p[j]) / m;
          if (p[j] > 0.0) g += cfg_.entropy_coef * p[j] * (std::log(p[j]) + h) / m;
          upstream[j] = g;
        }
        actor_.backward(actor_tape, upstream, actor_grad);

        const double v = critic_.forward(s.state, critic_tape)[0];
        critic_sum += (v - s.ret) * (v - s.ret);
        critic_up[0] = 2.0 * (v - s.ret) / m;
        critic_.backward(critic_tape, critic_up, critic_grad);
        ++counted;
      }
      nn::apply_update(actor_, actor_grad, actor_opt_);
      nn::apply_update(critic_, critic_grad, critic_opt_);
    }
  }
  ++updates_;
  stats.mean_surrogate = surrogate_sum / static_cast<double>(counted);
  stats.mean_entropy = entropy_sum / static_cast<double>(counted);
  stats.critic_loss = critic_sum / static_cast<double>(counted);
  return stats;
}

PpoPolicy::PpoPolicy(std::size_t state_dim, PpoConfig cfg, std::uint64_t seed)
    : agent_(state_dim, app::kNumModes, std::move(cfg), seed) {}

void PpoPolicy::begin_episode(std::size_t) {}

SegmentationMode PpoPolicy::act(const StateVector& state, const DecisionContext&, bool explore) {
  return mode_of(agent_.select_action(state, explore));
}

void PpoPolicy::observe(const Transition& t) {
  // Trajectories are keyed per episode and vehicle so GAE never crosses them.
  agent_.record(t.state, t.action, t.reward, t.next_state, t.terminal, (episode_index_ << 32) | t.vehicle_id);
}

void PpoPolicy::end_episode() {
  agent_.finish_episode();
  ++episode_index_;
  if (agent_.update_due()) agent_.update();
}

std::unique_ptr<Policy> PpoPolicy::frozen_copy() const {
  auto copy = std::make_unique<PpoPolicy>(agent_.state_dim(), agent_.config(), 0);
  copy->agent().actor() = agent_.actor();
  copy->agent().critic() = agent_.critic();
  return copy;
}

std::uint64_t PpoPolicy::parameter_checksum() const {
  return agent_.actor().checksum() ^ sim::splitmix64(agent_.critic().checksum());
}

void PpoPolicy::save(const std::filesystem::path& dir) const {
  nn::save_checkpoint(dir / "ppo_actor.ckpt", agent_.actor());
  nn::save_checkpoint(dir / "ppo_critic.ckpt", agent_.critic());
  const auto& c = agent_.config();
  nlohmann::ordered_json manifest;
  manifest["policy"] = "PPO";
  manifest["state_dim"] = agent_.state_dim();
  manifest["num_actions"] = agent_.num_actions();
  manifest["hyperparameters"] = {{"hidden_layers", c.hidden_layers},
                                 {"discount", c.discount},
                                 {"gae_lambda", c.gae_lambda},
                                 {"actor_learning_rate", c.actor_learning_rate},
                                 {"critic_learning_rate", c.critic_learning_rate},
                                 {"epochs", c.epochs},
                                 {"minibatch_size", c.minibatch_size},
                                 {"clip", c.clip},
                                 {"entropy_coef", c.entropy_coef},
                                 {"normalize_advantages", c.normalize_advantages},
                                 {"episodes_per_update", c.episodes_per_update}};
  manifest["updates"] = agent_.update_count();
  manifest["checkpoints"] = {{"actor", "ppo_actor.ckpt"}, {"critic", "ppo_critic.ckpt"}};
  std::ofstream out(dir / "agent_manifest.json");
  if (!out) throw InputError("cannot write agent manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
}

}  // namespace teleran::agents
