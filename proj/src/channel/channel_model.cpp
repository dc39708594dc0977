#include "teleran/channel/channel_model.hpp"

#include <numbers>

namespace teleran::channel {

ParametricChannel::ParametricChannel(std::size_t num_vehicles, const RadioConfig& radio,
                                     const MobilityConfig& mobility, std::uint64_t episode_seed)
    : radio_(radio),
      mobility_(mobility),
      gnb_(mobility.bounds.center()),
      mobility_rng_("mobility", episode_seed),
      shadowing_rng_("shadowing", episode_seed) {
  const auto& b = mobility_.bounds;
  poses_.reserve(num_vehicles);
  for (std::size_t i = 0; i < num_vehicles; ++i) {
    VehiclePose pose;
    pose.vehicle_id = static_cast<VehicleId>(i);
    pose.position = {mobility_rng_.uniform(b.x_min, b.x_max), mobility_rng_.uniform(b.y_min, b.y_max)};
    pose.speed_mps = mobility_rng_.uniform(mobility_.speed_min_mps, mobility_.speed_max_mps);
    pose.heading_rad = mobility_rng_.uniform(0.0, 2.0 * std::numbers::pi);
    poses_.push_back(pose);
    shadowing_.emplace_back(radio_.shadowing_stddev_db, radio_.shadowing_correlation_m,
                            shadowing_rng_.normal(0.0, radio_.shadowing_stddev_db));
  }
  pathloss_.resize(num_vehicles);
  for (std::size_t i = 0; i < num_vehicles; ++i) refresh(i);
}

void ParametricChannel::refresh(std::size_t i) {
  pathloss_[i] = pathloss_at(poses_[i], gnb_, shadowing_[i].value_db(), radio_);
}

void ParametricChannel::advance_to(SimTime now) {
  if (now - last_update_ < mobility_.update_period) return;
  const double dt = (now - last_update_).seconds();
  last_update_ = now;
  for (std::size_t i = 0; i < poses_.size(); ++i) {
    advance_pose(poses_[i], dt, mobility_.bounds, mobility_.heading_jitter, mobility_rng_);
    shadowing_[i].advance(poses_[i].speed_mps * dt, shadowing_rng_);
    refresh(i);
  }
}

TraceChannel::TraceChannel(std::shared_ptr<const ChannelTrace> trace, std::size_t num_vehicles)
    : trace_(std::move(trace)), pathloss_(num_vehicles, 0.0) {
  require(trace_ != nullptr, "trace channel: null trace");
  for (std::size_t i = 0; i < num_vehicles; ++i) {
    if (!trace_->has_vehicle(static_cast<VehicleId>(i))) {
      throw InputError("channel trace has no samples for vehicle " + std::to_string(i));
    }
  }
  advance_to(SimTime{});
}

void TraceChannel::advance_to(SimTime now) {
  for (std::size_t i = 0; i < pathloss_.size(); ++i) {
    pathloss_[i] = trace_->pathloss_at(static_cast<VehicleId>(i), now.seconds());
  }
}

}  // namespace teleran::channel
