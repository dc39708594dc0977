#pragma once

#include <memory>
#include <vector>

#include "teleran/channel/radio.hpp"
#include "teleran/channel/trace.hpp"

namespace teleran::channel {

// Per-vehicle pathloss as seen by the RAN, regardless of where it comes from.
class ChannelModel {
 public:
  virtual ~ChannelModel() = default;
  // Moves the model to `now`; called once per TTI with increasing times.
  virtual void advance_to(SimTime now) = 0;
  virtual double pathloss_db(VehicleId id) const = 0;
  virtual std::size_t vehicle_count() const = 0;
};

struct MobilityConfig {
  ScenarioBounds bounds;
  double speed_min_mps = 5.0;
  double speed_max_mps = 15.0;
  double heading_jitter = 0.1;  // rad/sqrt(s)
  // Large-scale state (pose, shadowing) is refreshed at this period.
  SimTime update_period = SimTime::from_millis(10);
};

// Bounded-box mobility, log-distance pathloss and Gauss-Markov shadowing.
class ParametricChannel final : public ChannelModel {
 public:
  ParametricChannel(std::size_t num_vehicles, const RadioConfig& radio, const MobilityConfig& mobility,
                    std::uint64_t episode_seed);

  void advance_to(SimTime now) override;
  double pathloss_db(VehicleId id) const override { return pathloss_.at(id); }
  std::size_t vehicle_count() const override { return poses_.size(); }

  const std::vector<VehiclePose>& poses() const { return poses_; }
  Point2 gnb_position() const { return gnb_; }

 private:
  void refresh(std::size_t i);

  RadioConfig radio_;
  MobilityConfig mobility_;
  Point2 gnb_;
  SimTime last_update_;
  std::vector<VehiclePose> poses_;
  std::vector<ShadowingProcess> shadowing_;
  std::vector<double> pathloss_;
  sim::RngStream mobility_rng_;
  sim::RngStream shadowing_rng_;
};

// Replays a pathloss trace, interpolated linearly in time.
class TraceChannel final : public ChannelModel {
 public:
  TraceChannel(std::shared_ptr<const ChannelTrace> trace, std::size_t num_vehicles);

  void advance_to(SimTime now) override;
  double pathloss_db(VehicleId id) const override { return pathloss_.at(id); }
  std::size_t vehicle_count() const override { return pathloss_.size(); }

 private:
  std::shared_ptr<const ChannelTrace> trace_;
  std::vector<double> pathloss_;
};

}  // namespace teleran::channel
