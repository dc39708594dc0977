#include "teleran/channel/radio.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace teleran::channel {

void RadioConfig::validate() const {
  if (!(bandwidth_hz > 0.0)) throw InputError("radio.bandwidth_hz must be positive");
  if (!(carrier_frequency_hz > 0.0)) throw InputError("radio.carrier_frequency_hz must be positive");
  if (!(pathloss_exponent >= 2.0)) throw InputError("radio.pathloss_exponent must be >= 2");
  if (shadowing_stddev_db < 0.0) throw InputError("radio.shadowing_stddev_db must be >= 0");
  if (!(shadowing_correlation_m > 0.0)) throw InputError("radio.shadowing_correlation_m must be positive");
  if (fading_jitter_db < 0.0) throw InputError("radio.fading_jitter_db must be >= 0");
  if (!allowed_tx_powers_dbm.empty() &&
      std::find(allowed_tx_powers_dbm.begin(), allowed_tx_powers_dbm.end(), tx_power_dbm) ==
          allowed_tx_powers_dbm.end()) {
    throw InputError("radio.tx_power_dbm " + std::to_string(tx_power_dbm) +
                     " is not in radio.allowed_tx_powers_dbm");
  }
}

namespace {

double reflect_axis(double& coord, double lo, double hi) {
  // Returns -1 when the motion along this axis must be reversed.
  if (coord > hi) {
    coord = std::max(lo, 2 * hi - coord);
    return -1.0;
  }
  if (coord < lo) {
    coord = std::min(hi, 2 * lo - coord);
    return -1.0;
  }
  return 1.0;
}

}  // namespace

void advance_pose(VehiclePose& pose, double dt, const ScenarioBounds& bounds, double heading_jitter,
                  sim::RngStream& rng) {
  require(dt > 0.0, "step_mobility: dt must be positive");
  if (heading_jitter > 0.0) pose.heading_rad += rng.normal(0.0, heading_jitter * std::sqrt(dt));
  double vx = pose.speed_mps * std::cos(pose.heading_rad);
  double vy = pose.speed_mps * std::sin(pose.heading_rad);
  pose.position.x += vx * dt;
  pose.position.y += vy * dt;
  vx *= reflect_axis(pose.position.x, bounds.x_min, bounds.x_max);
  vy *= reflect_axis(pose.position.y, bounds.y_min, bounds.y_max);
  if (pose.speed_mps > 0.0) pose.heading_rad = std::atan2(vy, vx);
  pose.position.x = std::clamp(pose.position.x, bounds.x_min, bounds.x_max);
  pose.position.y = std::clamp(pose.position.y, bounds.y_min, bounds.y_max);
}

std::vector<VehiclePose> step_mobility(const std::vector<VehiclePose>& poses, double dt,
                                       const ScenarioBounds& bounds, double heading_jitter,
                                       sim::RngStream& rng) {
  std::vector<VehiclePose> out = poses;
  for (auto& pose : out) advance_pose(pose, dt, bounds, heading_jitter, rng);
  return out;
}

double pathloss_at(const VehiclePose& pose, Point2 gnb_position, double shadow_db, const RadioConfig& cfg) {
  const double d = std::max(1.0, std::hypot(pose.position.x - gnb_position.x, pose.position.y - gnb_position.y));
  return cfg.reference_loss_db + 10.0 * cfg.pathloss_exponent * std::log10(d) + shadow_db;
}

double snr_db(double pathloss_db, double allocated_bandwidth_hz, const RadioConfig& cfg) {
  require(allocated_bandwidth_hz > 0.0 && allocated_bandwidth_hz <= cfg.bandwidth_hz,
          "snr: allocated bandwidth must be in (0, B]");
  const double noise_dbm = kThermalNoiseDbmPerHz + 10.0 * std::log10(allocated_bandwidth_hz) + cfg.noise_figure_db;
  return cfg.tx_power_dbm - pathloss_db - noise_dbm;
}

double ShadowingProcess::coefficient(double distance_m) const {
  return std::exp(-std::abs(distance_m) / correlation_m_);
}

double ShadowingProcess::advance(double distance_m, sim::RngStream& rng) {
  return advance_with_coefficient(coefficient(distance_m), rng);
}

double ShadowingProcess::advance_with_coefficient(double rho, sim::RngStream& rng) {
  require(rho >= 0.0 && rho <= 1.0, "shadowing: AR coefficient must be in [0, 1]");
  if (rho == 1.0) return value_db_;
  value_db_ = rho * value_db_ + std::sqrt(1.0 - rho * rho) * stddev_db_ * rng.normal();
  return value_db_;
}

}  // namespace teleran::channel
