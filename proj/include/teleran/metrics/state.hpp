#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "teleran/metrics/kpi.hpp"

namespace teleran::metrics {

enum class StateConfig { kApp, kPhy, kFull, kAppNet, kPhyNet };

std::size_t state_dimension(StateConfig cfg);
std::string_view state_config_name(StateConfig cfg);
// Accepts APP, PHY, FULL, APP_NET, PHY_NET. Throws InputError otherwise.
StateConfig parse_state_config(std::string_view name);

using StateVector = std::vector<double>;

// Fixed per-feature scales; features are divided by them and clipped to [0, 1].
struct NormalizationScales {
  double delay_s = 0.100;
  double throughput_bps = 16e6;
  double sinr_offset_db = 10.0;
  double sinr_range_db = 40.0;
  double mcs_index = 28.0;
  double queue_bytes = 2e6;
  double pdus_per_window = 134.0;

  static NormalizationScales defaults_for(const KpiThresholds& thr, const app::SegmentationProfile& profile,
                                          const app::AppConfig& app_cfg, const ran::RanConfig& ran_cfg);
};

// Builds the state of one vehicle. `peers` must not contain obs.vehicle_id;
// the peer average is taken over features sorted by vehicle id so the result
// does not depend on peer order. With no peers the average is all zeros.
StateVector assemble_state(const StepObservation& obs, std::span<const StepObservation> peers, StateConfig cfg,
                           const NormalizationScales& scales);

}  // namespace teleran::metrics
