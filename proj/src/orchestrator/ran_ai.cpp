#include "teleran/orchestrator/ran_ai.hpp"

namespace teleran::orchestrator {

RanAi::RanAi(RanAiConfig cfg, agents::Policy& policy) : cfg_(std::move(cfg)), policy_(policy) {
  cfg_.thresholds.validate();
  require(cfg_.update_period > SimTime{}, "ran_ai: update period must be positive");
}

void RanAi::register_vehicle(VehicleId id) {
  require(id == vehicles_.size(), "ran_ai: vehicles must be registered once, in id order");
  VehicleContext ctx;
  ctx.id = id;
  ctx.mode = cfg_.initial_mode;
  vehicles_.push_back(std::move(ctx));
}

void RanAi::begin_episode() {
  for (auto& v : vehicles_) {
    v.mode = cfg_.initial_mode;
    v.last_observation.reset();
    v.last_state.clear();
    v.has_decision = false;
  }
  ticks_ = 0;
  policy_.begin_episode(vehicles_.size());
}

std::vector<metrics::StepObservation> RanAi::close_windows(MeasurementSource& source) {
  std::vector<metrics::StepObservation> obs;
  obs.reserve(vehicles_.size());
  for (auto& v : vehicles_) {
    const auto app_w = source.close_app_window(v.id, cfg_.update_period);
    const auto link_w = source.close_link_window(v.id, cfg_.update_period);
    obs.push_back(metrics::evaluate_step(v.id, app_w, link_w, v.mode, cfg_.profile, cfg_.thresholds,
                                         cfg_.delay_statistic));
    v.last_observation = obs.back();
    if (logger_) logger_(TickRecord{ticks_ - 1, obs.back()});
  }
  return obs;
}

std::vector<metrics::StateVector> RanAi::build_states(const std::vector<metrics::StepObservation>& obs) const {
  std::vector<metrics::StateVector> states;
  states.reserve(obs.size());
  std::vector<metrics::StepObservation> peers;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    peers.clear();
    for (std::size_t j = 0; j < obs.size(); ++j) {
      if (j != i) peers.push_back(obs[j]);
    }
    states.push_back(metrics::assemble_state(obs[i], peers, cfg_.state_config, cfg_.scales));
  }
  return states;
}

void RanAi::feed_transitions(const std::vector<metrics::StateVector>& states, bool terminal) {
  if (!cfg_.learning) return;
  for (std::size_t i = 0; i < vehicles_.size(); ++i) {
    const auto& v = vehicles_[i];
    if (!v.has_decision) continue;
    agents::Transition t;
    t.state = v.last_state;
    t.action = v.last_action;
    t.reward = v.last_observation->reward;
    t.next_state = states[i];
    t.terminal = terminal;
    t.vehicle_id = v.id;
    t.step_index = ticks_ - 1;
    policy_.observe(t);
  }
}

void RanAi::on_update_tick(MeasurementSource& source) {
  std::vector<metrics::StateVector> states;
  if (ticks_ == 0) {
    // Nothing has been measured yet; the first decision sees an all-zero state.
    states.assign(vehicles_.size(), metrics::StateVector(metrics::state_dimension(cfg_.state_config), 0.0));
  } else {
    states = build_states(close_windows(source));
    feed_transitions(states, false);
  }
  for (std::size_t i = 0; i < vehicles_.size(); ++i) {
    auto& v = vehicles_[i];
    agents::DecisionContext ctx;
    ctx.vehicle_id = v.id;
    ctx.current_mode = v.mode;
    ctx.last_observation = v.last_observation ? &*v.last_observation : nullptr;
    const auto next = policy_.act(states[i], ctx, cfg_.explore);
    v.mode = next;
    v.last_state = std::move(states[i]);
    v.last_action = agents::action_of(next);
    v.has_decision = true;
  }
  if (cfg_.learning) policy_.end_tick();
  ++ticks_;
}

void RanAi::on_episode_end(MeasurementSource& source) {
  if (ticks_ > 0) {
    const auto states = build_states(close_windows(source));
    feed_transitions(states, true);
  }
  if (cfg_.learning) policy_.end_episode();
}

}  // namespace teleran::orchestrator
