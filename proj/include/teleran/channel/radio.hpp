#pragma once

#include <string>
#include <vector>

#include "teleran/common.hpp"
#include "teleran/sim/rng.hpp"

namespace teleran::channel {

inline constexpr double kThermalNoiseDbmPerHz = -174.0;

struct RadioConfig {
  double carrier_frequency_hz = 3.5e9;
  double bandwidth_hz = 50e6;
  double tx_power_dbm = 30.0;
  std::vector<double> allowed_tx_powers_dbm{23.0, 30.0};
  double noise_figure_db = 5.0;
  double pathloss_exponent = 3.7;
  double reference_loss_db = 43.3;  // free-space loss at 1 m for 3.5 GHz
  double shadowing_stddev_db = 4.0;
  double shadowing_correlation_m = 50.0;
  double fading_jitter_db = 0.0;  // per-TTI small-scale term, off by default

  // Throws InputError when an invariant does not hold.
  void validate() const;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct ScenarioBounds {
  double x_min = -150.0;
  double x_max = 150.0;
  double y_min = -150.0;
  double y_max = 150.0;

  bool contains(Point2 p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  Point2 center() const { return {(x_min + x_max) / 2, (y_min + y_max) / 2}; }
};

struct VehiclePose {
  VehicleId vehicle_id = 0;
  Point2 position;
  double speed_mps = 0.0;
  double heading_rad = 0.0;
};

// Advances one pose by dt seconds. Headings reflect off the bounding box and
// the position is clamped inside it. heading_jitter is in rad/sqrt(s).
void advance_pose(VehiclePose& pose, double dt, const ScenarioBounds& bounds,
                  double heading_jitter, sim::RngStream& rng);

std::vector<VehiclePose> step_mobility(const std::vector<VehiclePose>& poses, double dt,
                                       const ScenarioBounds& bounds, double heading_jitter,
                                       sim::RngStream& rng);

// Log-distance pathloss plus the current shadowing value. Distances below
// 1 m are clamped.
double pathloss_at(const VehiclePose& pose, Point2 gnb_position, double shadow_db,
                   const RadioConfig& cfg);

// SNR in dB when P_tx is spread over allocated_bandwidth_hz.
double snr_db(double pathloss_db, double allocated_bandwidth_hz, const RadioConfig& cfg);

// First-order Gauss-Markov shadowing, correlated over distance travelled.
class ShadowingProcess {
 public:
  ShadowingProcess(double stddev_db, double correlation_m, double initial_db = 0.0)
      : stddev_db_(stddev_db), correlation_m_(correlation_m), value_db_(initial_db) {}

  double value_db() const { return value_db_; }
  // AR coefficient for a displacement of distance_m.
  double coefficient(double distance_m) const;
  double advance(double distance_m, sim::RngStream& rng);
  // Step with an explicit AR coefficient in [0, 1].
  double advance_with_coefficient(double rho, sim::RngStream& rng);

 private:
  double stddev_db_;
  double correlation_m_;
  double value_db_;
};

}  // namespace teleran::channel
