#include "teleran/metrics/state.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace teleran::metrics {

std::size_t state_dimension(StateConfig cfg) {
  switch (cfg) {
    case StateConfig::kApp:
      return 5;
    case StateConfig::kPhy:
      return 8;
    case StateConfig::kFull:
      return 18;
    case StateConfig::kAppNet:
      return 10;
    case StateConfig::kPhyNet:
      return 16;
  }
  return 0;
}

std::string_view state_config_name(StateConfig cfg) {
  switch (cfg) {
    case StateConfig::kApp:
      return "APP";
    case StateConfig::kPhy:
      return "PHY";
    case StateConfig::kFull:
      return "FULL";
    case StateConfig::kAppNet:
      return "APP_NET";
    case StateConfig::kPhyNet:
      return "PHY_NET";
  }
  return "?";
}

StateConfig parse_state_config(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  for (auto cfg : {StateConfig::kApp, StateConfig::kPhy, StateConfig::kFull, StateConfig::kAppNet,
                   StateConfig::kPhyNet}) {
    if (upper == state_config_name(cfg)) return cfg;
  }
  throw InputError("unknown state config `" + std::string(name) + "` (expected APP, PHY, FULL, APP_NET, PHY_NET)");
}

NormalizationScales NormalizationScales::defaults_for(const KpiThresholds& thr,
                                                      const app::SegmentationProfile& profile,
                                                      const app::AppConfig& app_cfg,
                                                      const ran::RanConfig& ran_cfg) {
  NormalizationScales s;
  const auto& raw = profile[app::SegmentationMode::kRaw];
  s.delay_s = 2.0 * thr.delay_max_s;
  s.throughput_bps = static_cast<double>(raw.frame_bytes) * 8.0 / app_cfg.frame_period.seconds();
  s.mcs_index = static_cast<double>(ran_cfg.mcs_table.entries().back().index);
  s.queue_bytes = static_cast<double>(ran_cfg.buffer_capacity_bytes);
  s.pdus_per_window = static_cast<double>(app::packet_count_for(raw.frame_bytes, app_cfg.pdu_payload_bytes));
  return s;
}

namespace {

double unit(double v, double scale) { return std::clamp(v / scale, 0.0, 1.0); }

void push_app(StateVector& out, const StepObservation& o, const NormalizationScales& s) {
  out.push_back(unit(o.app.delay_mean_s, s.delay_s));
  out.push_back(unit(o.app.delay_std_s, s.delay_s));
  out.push_back(unit(o.app.delay_min_s, s.delay_s));
  out.push_back(unit(o.app.delay_max_s, s.delay_s));
  out.push_back(unit(o.app.throughput_mean_bps, s.throughput_bps));
}

void push_phy(StateVector& out, const StepObservation& o, const NormalizationScales& s) {
  out.push_back(unit(o.link.mean_sinr_db + s.sinr_offset_db, s.sinr_range_db));
  out.push_back(unit(o.link.mean_mcs_index, s.mcs_index));
  out.push_back(std::clamp(o.link.prb_utilization, 0.0, 1.0));
}

void push_stack(StateVector& out, const StepObservation& o, const NormalizationScales& s) {
  const auto& l = o.link;
  out.push_back(unit(l.rlc_queue_bytes, s.queue_bytes));
  out.push_back(unit(l.rlc_mean_queue_delay_s, s.delay_s));
  out.push_back(unit(l.rlc_tx_pdus, s.pdus_per_window));
  out.push_back(unit(l.rlc_dropped_pdus, s.pdus_per_window));
  out.push_back(unit(l.rlc_retx, s.pdus_per_window));
  out.push_back(unit(l.pdcp_tx_pdus, s.pdus_per_window));
  out.push_back(unit(l.pdcp_rx_pdus, s.pdus_per_window));
  out.push_back(unit(l.pdcp_mean_delay_s, s.delay_s));
  out.push_back(unit(l.pdcp_throughput_bps, s.throughput_bps));
  out.push_back(std::clamp(l.pdcp_loss_ratio, 0.0, 1.0));
}

void push_local(StateVector& out, const StepObservation& o, bool with_phy, const NormalizationScales& s) {
  push_app(out, o, s);
  if (with_phy) push_phy(out, o, s);
}

void push_peer_mean(StateVector& out, const StepObservation& self, std::span<const StepObservation> peers,
                    bool with_phy, const NormalizationScales& s) {
  const std::size_t width = with_phy ? 8 : 5;
  std::vector<const StepObservation*> sorted;
  sorted.reserve(peers.size());
  for (const auto& p : peers) {
    require(p.vehicle_id != self.vehicle_id, "assemble_state: peers must exclude the target vehicle");
    sorted.push_back(&p);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const StepObservation* a, const StepObservation* b) { return a->vehicle_id < b->vehicle_id; });
  std::vector<double> mean(width, 0.0);
  StateVector tmp;
  for (const auto* p : sorted) {
    tmp.clear();
    push_local(tmp, *p, with_phy, s);
    for (std::size_t k = 0; k < width; ++k) mean[k] += tmp[k];
  }
  if (!sorted.empty()) {
    for (auto& m : mean) m /= static_cast<double>(sorted.size());
  }
  out.insert(out.end(), mean.begin(), mean.end());
}

}  // namespace

StateVector assemble_state(const StepObservation& obs, std::span<const StepObservation> peers, StateConfig cfg,
                           const NormalizationScales& scales) {
  StateVector out;
  out.reserve(state_dimension(cfg));
  switch (cfg) {
    case StateConfig::kApp:
      push_local(out, obs, false, scales);
      break;
    case StateConfig::kPhy:
      push_local(out, obs, true, scales);
      break;
    case StateConfig::kFull:
      push_local(out, obs, true, scales);
      push_stack(out, obs, scales);
      break;
    case StateConfig::kAppNet:
      push_local(out, obs, false, scales);
      push_peer_mean(out, obs, peers, false, scales);
      break;
    case StateConfig::kPhyNet:
      push_local(out, obs, true, scales);
      push_peer_mean(out, obs, peers, true, scales);
      break;
  }
  require(out.size() == state_dimension(cfg), "assemble_state: dimension mismatch");
  return out;
}

}  // namespace teleran::metrics
