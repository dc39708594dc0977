#pragma once

#include <span>
#include <vector>

#include "teleran/channel/radio.hpp"
#include "teleran/ran/mcs_table.hpp"
#include "teleran/ran/ue_queue.hpp"

namespace teleran::ran {

struct RanConfig {
  McsTable mcs_table = McsTable::capped_shannon();
  std::uint64_t buffer_capacity_bytes = 2'000'000;
  SimTime tti = SimTime::from_millis(1);
  SimTime core_network_delay = SimTime::from_millis(5);
  // When set, link adaptation sees the SNR with P_tx concentrated on the
  // allocated share instead of the wideband SNR.
  bool snr_over_allocated_bandwidth = false;
};

// Per-vehicle PHY/RLC/PDCP aggregates over one RAN-AI window.
struct LinkStatsWindow {
  bool valid = false;  // false when the window saw no traffic at all
  double mean_sinr_db = 0.0;
  double mean_mcs_index = 0.0;
  double prb_utilization = 0.0;
  double rlc_queue_bytes = 0.0;
  double rlc_mean_queue_delay_s = 0.0;
  double rlc_tx_pdus = 0.0;
  double rlc_dropped_pdus = 0.0;
  double rlc_retx = 0.0;
  double pdcp_tx_pdus = 0.0;
  double pdcp_rx_pdus = 0.0;
  double pdcp_mean_delay_s = 0.0;
  double pdcp_throughput_bps = 0.0;
  double pdcp_loss_ratio = 0.0;
};

// Result of one TTI for one vehicle, exposed for tests and diagnostics.
struct TtiGrant {
  double share_hz = 0.0;
  McsSelection mcs;
  std::uint64_t budget_bytes = 0;
  std::uint64_t served_bytes = 0;
};

// Abstracted uplink cell: per-vehicle queues, equal-share round-robin
// scheduling per TTI, and window counters.
class RanModel {
 public:
  RanModel(std::size_t num_vehicles, channel::RadioConfig radio, RanConfig cfg);

  std::size_t vehicle_count() const { return queues_.size(); }
  const UeQueue& queue(VehicleId id) const { return queues_.at(id); }
  const RanConfig& config() const { return cfg_; }
  const std::vector<TtiGrant>& last_grants() const { return grants_; }

  bool enqueue_pdu(VehicleId id, std::uint32_t pdu_bytes, SimTime now, std::uint64_t frame_id,
                   std::uint32_t packet_index);

  // Splits the carrier equally among backlogged vehicles and serves each
  // queue at its MCS rate for one TTI. `wideband_snr_db` is the SNR over the
  // full carrier per vehicle. Returns the PDUs completed in this TTI with
  // arrival_time = now + tti + core_network_delay.
  std::vector<sim::DeliveredPdu> schedule_tti(SimTime now, std::span<const double> wideband_snr_db);

  // Receiver-side PDCP accounting for a PDU reaching the remote end.
  void on_pdu_received(const sim::DeliveredPdu& pdu);

  // Closes the window of the given length for one vehicle and resets its
  // accumulators.
  LinkStatsWindow collect_window_stats(VehicleId id, SimTime window_length);

 private:
  struct Accumulator {
    double sinr_sum = 0.0;
    double mcs_sum = 0.0;
    double prb_sum = 0.0;
    std::uint64_t ttis = 0;
    std::uint64_t rlc_tx = 0;
    double rlc_delay_sum = 0.0;
    std::uint64_t dropped = 0;
    std::uint64_t submitted = 0;
    std::uint64_t rx = 0;
    std::uint64_t rx_bytes = 0;
    double pdcp_delay_sum = 0.0;
  };

  channel::RadioConfig radio_;
  RanConfig cfg_;
  std::vector<UeQueue> queues_;
  std::vector<Accumulator> acc_;
  std::vector<TtiGrant> grants_;
};

}  // namespace teleran::ran
