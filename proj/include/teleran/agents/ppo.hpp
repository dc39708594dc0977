#pragma once

#include <map>
#include <span>
#include <vector>

#include "teleran/agents/policy.hpp"
#include "teleran/nn/dense_net.hpp"

namespace teleran::agents {

struct PpoConfig {
  std::vector<std::size_t> hidden_layers{64, 16};
  double discount = 0.95;
  double gae_lambda = 0.95;
  double actor_learning_rate = 1e-4;
  double critic_learning_rate = 5e-4;
  std::size_t epochs = 32;
  std::size_t minibatch_size = 256;
  double clip = 0.2;
  double entropy_coef = 0.01;
  bool normalize_advantages = true;
  // Run an update once this many episodes have been collected.
  std::size_t episodes_per_update = 1;

  void validate() const;
};

std::vector<double> softmax(std::span<const double> logits);
// Entropy of a probability vector, natural log; zero entries contribute 0.
double entropy(std::span<const double> probs);

// min(r * A, clip(r, 1 - eps, 1 + eps) * A)
double clipped_surrogate(double ratio, double advantage, double clip);
// True when the unclipped term attains the minimum, i.e. the ratio still
// receives gradient.
bool surrogate_unclipped(double ratio, double advantage, double clip);

// Generalised advantage estimates for one trajectory. values[t] = V(s_t),
// next_values[t] = V(s_{t+1}); terminal[t] cuts both the bootstrap and the
// recursion.
std::vector<double> compute_gae(std::span<const double> rewards, std::span<const double> values,
                                std::span<const double> next_values, const std::vector<bool>& terminal,
                                double discount, double lambda);

struct PpoSample {
  StateVector state;
  int action = 0;
  double log_prob = 0.0;
  double value = 0.0;
  double next_value = 0.0;
  double reward = 0.0;
  bool terminal = false;
  double advantage = 0.0;
  double ret = 0.0;
};

struct PpoUpdateStats {
  std::size_t samples = 0;
  double mean_surrogate = 0.0;
  double mean_entropy = 0.0;
  double critic_loss = 0.0;
};

// Clipped-surrogate actor-critic with a softmax actor and a state-value critic.
class PpoAgent {
 public:
  PpoAgent(std::size_t state_dim, std::size_t num_actions, PpoConfig cfg, std::uint64_t seed);

  const PpoConfig& config() const { return cfg_; }
  std::size_t state_dim() const { return actor_.input_size(); }
  std::size_t num_actions() const { return actor_.output_size(); }
  const nn::DenseNet& actor() const { return actor_; }
  const nn::DenseNet& critic() const { return critic_; }
  nn::DenseNet& actor() { return actor_; }
  nn::DenseNet& critic() { return critic_; }

  std::vector<double> action_probabilities(std::span<const double> state) const;
  double value(std::span<const double> state) const;

  // Samples from the actor when explore is set, argmax otherwise.
  int select_action(std::span<const double> state, bool explore);

  // Appends one step to trajectory `trajectory_id`. Log-probability and
  // values are evaluated with the current (pre-update) parameters.
  void record(std::span<const double> state, int action, double reward, std::span<const double> next_state,
              bool terminal, std::uint64_t trajectory_id);
  void finish_episode();
  bool update_due() const { return episodes_collected_ >= cfg_.episodes_per_update; }
  std::size_t buffered_samples() const;
  const std::map<std::uint64_t, std::vector<PpoSample>>& trajectories() const { return trajectories_; }

  // Computes advantages, runs the epochs and clears the rollout buffer.
  PpoUpdateStats update();
  std::uint64_t update_count() const { return updates_; }

 private:
  PpoConfig cfg_;
  nn::DenseNet actor_;
  nn::DenseNet critic_;
  nn::Optimizer actor_opt_;
  nn::Optimizer critic_opt_;
  sim::RngStream action_rng_;
  sim::RngStream shuffle_rng_;
  std::map<std::uint64_t, std::vector<PpoSample>> trajectories_;
  std::size_t episodes_collected_ = 0;
  std::uint64_t updates_ = 0;
};

class PpoPolicy final : public Policy {
 public:
  PpoPolicy(std::size_t state_dim, PpoConfig cfg, std::uint64_t seed);

  std::string name() const override { return "PPO"; }
  bool learns() const override { return true; }
  void begin_episode(std::size_t num_vehicles) override;
  SegmentationMode act(const StateVector& state, const DecisionContext& ctx, bool explore) override;
  void observe(const Transition& transition) override;
  void end_episode() override;
  std::unique_ptr<Policy> frozen_copy() const override;
  std::uint64_t parameter_checksum() const override;
  void save(const std::filesystem::path& dir) const override;

  PpoAgent& agent() { return agent_; }
  const PpoAgent& agent() const { return agent_; }

 private:
  PpoAgent agent_;
  std::uint64_t episode_index_ = 0;
};

}  // namespace teleran::agents
