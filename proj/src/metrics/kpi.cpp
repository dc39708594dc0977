#include "teleran/metrics/kpi.hpp"

#include <algorithm>
#include <atomic>
#include <iostream>
#include <limits>

namespace teleran::metrics {

namespace {
std::atomic<std::uint64_t> g_qoe_clamps{0};
}

void KpiThresholds::validate() const {
  if (!(delay_max_s > 0.0)) throw InputError("thresholds.delay_max_s must be positive");
  if (!(prp_min >= 0.0 && prp_min <= 1.0)) throw InputError("thresholds.prp_min must be in [0, 1]");
  if (!(cd_max > 0.0)) throw InputError("thresholds.cd_max must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("thresholds.alpha must be in [0, 1]");
}

double prp(std::uint64_t n_rx, std::uint64_t n_tx) {
  if (n_tx == 0) return 1.0;
  return std::clamp(static_cast<double>(n_rx) / static_cast<double>(n_tx), 0.0, 1.0);
}

int qos(double delay_s, double prp_value, const KpiThresholds& thr) {
  return (delay_s <= thr.delay_max_s && prp_value >= thr.prp_min) ? 1 : 0;
}

double qoe(double cd, const KpiThresholds& thr) {
  require(cd >= 0.0, "qoe: chamfer distance must be non-negative");
  if (cd > thr.cd_max) {
    if (g_qoe_clamps.fetch_add(1) == 0) {
      std::clog << "warning: chamfer distance " << cd << " exceeds cd_max " << thr.cd_max
                << "; QoE clamped to 0\n";
    }
    return 0.0;
  }
  return (thr.cd_max - cd) / thr.cd_max;
}

std::uint64_t qoe_clamp_count() { return g_qoe_clamps.load(); }

double reward(double delay_s, int qos_value, double qoe_value, const KpiThresholds& thr) {
  if (qos_value == 0) return 0.0;
  const double r = (1.0 - thr.alpha) * (thr.delay_max_s - delay_s) / thr.delay_max_s + thr.alpha * qoe_value;
  return std::clamp(r, 0.0, 1.0);
}

namespace {

// Squared distance from p to its nearest neighbour in `sorted` (sorted by x).
double nearest_sq(const Point3& p, const PointCloud& sorted) {
  auto sq = [](const Point3& a, const Point3& b) {
    const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return dx * dx + dy * dy + dz * dz;
  };
  const auto start = std::lower_bound(sorted.begin(), sorted.end(), p[0],
                                      [](const Point3& q, double x) { return q[0] < x; });
  double best = std::numeric_limits<double>::infinity();
  for (auto it = start; it != sorted.end(); ++it) {
    const double dx = (*it)[0] - p[0];
    if (dx * dx >= best) break;
    best = std::min(best, sq(p, *it));
  }
  for (auto it = start; it != sorted.begin();) {
    --it;
    const double dx = p[0] - (*it)[0];
    if (dx * dx >= best) break;
    best = std::min(best, sq(p, *it));
  }
  return best;
}

double directed_sum(const PointCloud& from, const PointCloud& to_sorted) {
  double total = 0.0;
  for (const auto& p : from) total += nearest_sq(p, to_sorted);
  return total;
}

}  // namespace

double chamfer_distance(const PointCloud& a, const PointCloud& b) {
  require(!a.empty() && !b.empty(), "chamfer_distance: point clouds must be non-empty");
  auto by_x = [](const Point3& p, const Point3& q) { return p[0] < q[0]; };
  PointCloud sa = a, sb = b;
  std::sort(sa.begin(), sa.end(), by_x);
  std::sort(sb.begin(), sb.end(), by_x);
  return directed_sum(a, sb) + directed_sum(b, sa);
}

StepObservation evaluate_step(VehicleId vehicle_id, const app::AppKpiWindow& app_window,
                              const ran::LinkStatsWindow& link_window, app::SegmentationMode mode,
                              const app::SegmentationProfile& profile, const KpiThresholds& thr,
                              DelayStatistic statistic) {
  StepObservation obs;
  obs.vehicle_id = vehicle_id;
  obs.app = app_window;
  obs.link = link_window;
  obs.mode = mode;
  obs.prp = prp(app_window.n_rx, app_window.n_tx);
  obs.delay_s = statistic == DelayStatistic::kMean ? app_window.delay_mean_s : app_window.delay_max_s;
  obs.qos = qos(obs.delay_s, obs.prp, thr);
  obs.qoe = qoe(profile[mode].chamfer_distance, thr);
  obs.reward = reward(obs.delay_s, obs.qos, obs.qoe, thr);
  return obs;
}

}  // namespace teleran::metrics
