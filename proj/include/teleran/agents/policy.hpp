#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>

#include "teleran/app/segmentation.hpp"
#include "teleran/metrics/kpi.hpp"
#include "teleran/metrics/state.hpp"

namespace teleran::agents {

using app::SegmentationMode;
using metrics::StateVector;

struct Transition {
  StateVector state;
  int action = 0;
  double reward = 0.0;
  StateVector next_state;
  bool terminal = false;
  VehicleId vehicle_id = 0;
  std::uint64_t step_index = 0;
};

// What a policy may look at besides the state vector.
struct DecisionContext {
  VehicleId vehicle_id = 0;
  SegmentationMode current_mode = SegmentationMode::kConservative;
  // Observation of the window that just closed; null on a vehicle's first tick.
  const metrics::StepObservation* last_observation = nullptr;
};

// One policy instance is shared by every vehicle of the cell.
//
// Call order within an episode: begin_episode, then per tick act() for every
// vehicle; while training additionally observe() before the acts, end_tick()
// after them and end_episode() at the end.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string name() const = 0;
  virtual bool learns() const { return false; }

  virtual void begin_episode(std::size_t /*num_vehicles*/) {}
  virtual SegmentationMode act(const StateVector& state, const DecisionContext& ctx, bool explore) = 0;
  virtual void observe(const Transition& /*transition*/) {}
  virtual void end_tick() {}
  virtual void end_episode() {}

  // Copy with the same parameters but no learning buffers, for evaluation.
  virtual std::unique_ptr<Policy> frozen_copy() const = 0;
  virtual std::uint64_t parameter_checksum() const { return 0; }

  // Writes checkpoints and a JSON manifest into `dir`; no-op for policies
  // without parameters.
  virtual void save(const std::filesystem::path& /*dir*/) const {}
};

constexpr int action_of(SegmentationMode m) { return static_cast<int>(app::mode_index(m)); }
inline SegmentationMode mode_of(int action) { return app::mode_from_index(static_cast<std::size_t>(action)); }

// Index of the largest value; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

}  // namespace teleran::agents
