#pragma once

#include <vector>

#include "teleran/agents/policy.hpp"

namespace teleran::agents {

inline SegmentationMode constant_act(SegmentationMode mode) { return mode; }

// Static segmentation mode picked at the start (C-R, C-SC, C-SA).
class ConstantPolicy final : public Policy {
 public:
  explicit ConstantPolicy(SegmentationMode mode) : mode_(mode) {}

  std::string name() const override;
  SegmentationMode act(const StateVector&, const DecisionContext&, bool) override { return constant_act(mode_); }
  std::unique_ptr<Policy> frozen_copy() const override { return std::make_unique<ConstantPolicy>(mode_); }

 private:
  SegmentationMode mode_;
};

struct HeuristicParams {
  double upper_threshold_s = 0.0625;
  double lower_threshold_s = 0.0375;
  double smoothing = 0.2;  // weight of the newest sample

  void validate() const;
};

// Control-chart statistic for one vehicle.
struct HeuristicState {
  bool initialized = false;
  double smoothed_delay_s = 0.0;
};

// Folds `delay_sample_s` into the smoothed delay (the first sample
// initialises it) and moves one step more aggressive above the upper
// threshold or one step more conservative below the lower one, saturating
// at SA and R. After a mode change the statistic restarts at the midpoint
// between the thresholds.
SegmentationMode heuristic_act(double delay_sample_s, const HeuristicParams& params, HeuristicState& state,
                               SegmentationMode current);

// D-S benchmark: the heuristic above applied per vehicle to the window mean
// delay.
class DelayHeuristicPolicy final : public Policy {
 public:
  explicit DelayHeuristicPolicy(HeuristicParams params);

  std::string name() const override { return "D-S"; }
  void begin_episode(std::size_t num_vehicles) override;
  SegmentationMode act(const StateVector& state, const DecisionContext& ctx, bool explore) override;
  std::unique_ptr<Policy> frozen_copy() const override;

  const HeuristicState& state_of(VehicleId id) const { return states_.at(id); }

 private:
  HeuristicParams params_;
  std::vector<HeuristicState> states_;
};

}  // namespace teleran::agents
