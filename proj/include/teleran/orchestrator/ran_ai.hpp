#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "teleran/agents/policy.hpp"
#include "teleran/metrics/state.hpp"

namespace teleran::orchestrator {

using app::SegmentationMode;

// Where the RAN-AI reads the KPIs of the window that just closed.
class MeasurementSource {
 public:
  virtual ~MeasurementSource() = default;
  virtual app::AppKpiWindow close_app_window(VehicleId id, SimTime window_length) = 0;
  virtual ran::LinkStatsWindow close_link_window(VehicleId id, SimTime window_length) = 0;
};

struct RanAiConfig {
  metrics::StateConfig state_config = metrics::StateConfig::kFull;
  metrics::NormalizationScales scales;
  metrics::KpiThresholds thresholds;
  app::SegmentationProfile profile;
  metrics::DelayStatistic delay_statistic = metrics::DelayStatistic::kMean;
  SimTime update_period = SimTime::from_millis(100);
  SegmentationMode initial_mode = SegmentationMode::kConservative;
  bool learning = false;  // feed transitions to the policy
  bool explore = false;   // stochastic / epsilon-greedy action selection
};

// One closed window of one vehicle, as written to the per-tick log.
struct TickRecord {
  std::uint64_t step = 0;
  metrics::StepObservation observation;
};

struct VehicleContext {
  VehicleId id = 0;
  SegmentationMode mode = SegmentationMode::kConservative;
  std::optional<metrics::StepObservation> last_observation;
  metrics::StateVector last_state;
  int last_action = 0;
  bool has_decision = false;
};

// Per-cell controller: every update period it closes the window of each
// vehicle, scores it, builds the states and asks the policy for the next
// segmentation mode.
class RanAi {
 public:
  using TickLogger = std::function<void(const TickRecord&)>;

  RanAi(RanAiConfig cfg, agents::Policy& policy);

  const RanAiConfig& config() const { return cfg_; }

  void register_vehicle(VehicleId id);
  std::size_t vehicle_count() const { return vehicles_.size(); }
  SegmentationMode mode(VehicleId id) const { return vehicles_.at(id).mode; }
  const VehicleContext& vehicle(VehicleId id) const { return vehicles_.at(id); }

  void set_tick_logger(TickLogger logger) { logger_ = std::move(logger); }

  void begin_episode();
  void on_update_tick(MeasurementSource& source);
  // Closes the final window and emits terminal transitions.
  void on_episode_end(MeasurementSource& source);

  std::uint64_t ticks() const { return ticks_; }

 private:
  std::vector<metrics::StepObservation> close_windows(MeasurementSource& source);
  std::vector<metrics::StateVector> build_states(const std::vector<metrics::StepObservation>& obs) const;
  void feed_transitions(const std::vector<metrics::StateVector>& states, bool terminal);

  RanAiConfig cfg_;
  agents::Policy& policy_;
  std::vector<VehicleContext> vehicles_;
  TickLogger logger_;
  std::uint64_t ticks_ = 0;
};

}  // namespace teleran::orchestrator
