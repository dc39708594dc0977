#pragma once

#include <optional>
#include <span>
#include <vector>

#include "teleran/agents/policy.hpp"
#include "teleran/nn/dense_net.hpp"

namespace teleran::agents {

struct DqlConfig {
  std::vector<std::size_t> hidden_layers{64, 16};
  double discount = 0.95;
  double learning_rate = 1e-4;
  nn::OptimizerKind optimizer = nn::OptimizerKind::kAdam;
  std::size_t replay_capacity = 100'000;
  std::size_t batch_size = 32;
  std::size_t target_sync_period = 100;  // gradient steps
  std::size_t warmup_transitions = 1000;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double anneal_fraction = 0.5;
  std::uint64_t total_training_steps = 800'000;  // decision ticks over the whole training run

  void validate() const;
};

// Fixed-capacity ring of transitions.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  void push(Transition t);
  const Transition& operator[](std::size_t i) const { return items_.at(i); }

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> items_;
};

// y = r + discount * Q_target(s', argmax_a Q_online(s', a)); y = r when terminal.
double double_q_target(double reward, bool terminal, double discount, std::span<const double> q_online_next,
                       std::span<const double> q_target_next);

// Double Q-learning with an online and a target network and uniform replay.
class DqlAgent {
 public:
  DqlAgent(std::size_t state_dim, std::size_t num_actions, DqlConfig cfg, std::uint64_t seed);

  const DqlConfig& config() const { return cfg_; }
  std::size_t state_dim() const { return online_.input_size(); }
  std::size_t num_actions() const { return online_.output_size(); }

  const nn::DenseNet& online() const { return online_; }
  const nn::DenseNet& target() const { return target_; }
  nn::DenseNet& online() { return online_; }
  nn::DenseNet& target() { return target_; }
  const ReplayBuffer& replay() const { return replay_; }

  std::vector<double> q_values(std::span<const double> state) const { return online_.forward(state); }

  // Exploration rate after `schedule_steps()` decision ticks.
  double epsilon() const;
  std::uint64_t schedule_steps() const { return schedule_steps_; }
  std::uint64_t gradient_steps() const { return gradient_steps_; }
  void advance_schedule() { ++schedule_steps_; }

  // Epsilon-greedy when explore is set, greedy otherwise.
  int select_action(std::span<const double> state, bool explore);

  void remember(Transition t) { replay_.push(std::move(t)); }

  // One optimiser step on the mean squared TD error of `batch`; returns the
  // loss before the step. Syncs the target network every
  // target_sync_period steps.
  double train_step(std::span<const Transition* const> batch);

  // Samples a batch and trains when the buffer holds at least
  // max(warmup_transitions, batch_size) transitions.
  std::optional<double> maybe_train();

  void sync_target() { target_ = online_; }

 private:
  DqlConfig cfg_;
  nn::DenseNet online_;
  nn::DenseNet target_;
  nn::Optimizer optimizer_;
  ReplayBuffer replay_;
  sim::RngStream explore_rng_;
  sim::RngStream replay_rng_;
  std::uint64_t schedule_steps_ = 0;
  std::uint64_t gradient_steps_ = 0;
  std::vector<double> grad_;
  nn::DenseNet::Tape tape_;
};

class DqlPolicy final : public Policy {
 public:
  DqlPolicy(std::size_t state_dim, DqlConfig cfg, std::uint64_t seed);
  explicit DqlPolicy(DqlAgent agent) : agent_(std::move(agent)) {}

  std::string name() const override { return "DQL"; }
  bool learns() const override { return true; }
  SegmentationMode act(const StateVector& state, const DecisionContext& ctx, bool explore) override;
  void observe(const Transition& transition) override { agent_.remember(transition); }
  void end_tick() override;
  std::unique_ptr<Policy> frozen_copy() const override;
  std::uint64_t parameter_checksum() const override;
  void save(const std::filesystem::path& dir) const override;

  DqlAgent& agent() { return agent_; }
  const DqlAgent& agent() const { return agent_; }

 private:
  DqlAgent agent_;
};

}  // namespace teleran::agents
