#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "teleran/app/segmentation.hpp"
#include "teleran/app/traffic.hpp"
#include "teleran/ran/ran_model.hpp"

namespace teleran::metrics {

struct KpiThresholds {
  double delay_max_s = 0.050;
  double prp_min = 1.0;
  double cd_max = 45.0;
  double alpha = 1.0;

  void validate() const;
};

// Which per-window delay statistic is compared against delay_max_s.
enum class DelayStatistic { kMean, kMax };

// Received/transmitted ratio, clamped to [0, 1]; 1 when nothing was sent.
double prp(std::uint64_t n_rx, std::uint64_t n_tx);

int qos(double delay_s, double prp_value, const KpiThresholds& thr);

// Affine data-quality score; CDs above cd_max clamp to 0 and bump
// qoe_clamp_count().
double qoe(double cd, const KpiThresholds& thr);
std::uint64_t qoe_clamp_count();

double reward(double delay_s, int qos_value, double qoe_value, const KpiThresholds& thr);

using Point3 = std::array<double, 3>;
using PointCloud = std::vector<Point3>;

// Symmetric sum of squared nearest-neighbour distances. Both clouds must be
// non-empty.
double chamfer_distance(const PointCloud& a, const PointCloud& b);

struct StepObservation {
  VehicleId vehicle_id = 0;
  app::AppKpiWindow app;
  ran::LinkStatsWindow link;
  app::SegmentationMode mode = app::SegmentationMode::kRaw;
  double prp = 1.0;
  double delay_s = 0.0;  // the statistic fed to the QoS test
  int qos = 0;
  double qoe = 0.0;
  double reward = 0.0;
};

// Derives PRP, QoS, QoE and reward for one closed window.
StepObservation evaluate_step(VehicleId vehicle_id, const app::AppKpiWindow& app_window,
                              const ran::LinkStatsWindow& link_window, app::SegmentationMode mode,
                              const app::SegmentationProfile& profile, const KpiThresholds& thr,
                              DelayStatistic statistic = DelayStatistic::kMean);

}  // namespace teleran::metrics
