#include "teleran/agents/baselines.hpp"

#include <algorithm>

namespace teleran::agents {

std::size_t argmax(std::span<const double> values) {
  require(!values.empty(), "argmax: empty input");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

std::string ConstantPolicy::name() const { return "C-" + std::string(app::mode_name(mode_)); }

void HeuristicParams::validate() const {
  if (!(lower_threshold_s < upper_threshold_s)) throw InputError("heuristic: lower threshold must be below upper");
  if (!(smoothing > 0.0 && smoothing <= 1.0)) throw InputError("heuristic: smoothing must be in (0, 1]");
}

SegmentationMode heuristic_act(double delay_sample_s, const HeuristicParams& params, HeuristicState& state,
                               SegmentationMode current) {
  require(delay_sample_s >= 0.0, "heuristic_act: delay sample must be non-negative");
  if (!state.initialized) {
    state.smoothed_delay_s = delay_sample_s;
    state.initialized = true;
  } else {
    state.smoothed_delay_s = (1.0 - params.smoothing) * state.smoothed_delay_s + params.smoothing * delay_sample_s;
  }
  SegmentationMode next = current;
  if (state.smoothed_delay_s > params.upper_threshold_s) {
    next = app::more_aggressive(current);
  } else if (state.smoothed_delay_s < params.lower_threshold_s) {
    next = app::more_conservative(current);
  }
  if (next != current) state.smoothed_delay_s = 0.5 * (params.upper_threshold_s + params.lower_threshold_s);
  return next;
}

DelayHeuristicPolicy::DelayHeuristicPolicy(HeuristicParams params) : params_(params) { params_.validate(); }

void DelayHeuristicPolicy::begin_episode(std::size_t num_vehicles) { states_.assign(num_vehicles, HeuristicState{}); }

SegmentationMode DelayHeuristicPolicy::act(const StateVector&, const DecisionContext& ctx, bool) {
  if (ctx.vehicle_id >= states_.size()) states_.resize(ctx.vehicle_id + 1);
  if (ctx.last_observation == nullptr) return ctx.current_mode;
  return heuristic_act(ctx.last_observation->app.delay_mean_s, params_, states_[ctx.vehicle_id], ctx.current_mode);
}

std::unique_ptr<Policy> DelayHeuristicPolicy::frozen_copy() const {
  return std::make_unique<DelayHeuristicPolicy>(params_);
}

}  // namespace teleran::agents
