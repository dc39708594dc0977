#include "teleran/ran/ran_model.hpp"

#include <cmath>

namespace teleran::ran {

RanModel::RanModel(std::size_t num_vehicles, channel::RadioConfig radio, RanConfig cfg)
    : radio_(std::move(radio)), cfg_(std::move(cfg)), acc_(num_vehicles), grants_(num_vehicles) {
  require(cfg_.tti > SimTime{}, "ran: TTI must be positive");
  queues_.reserve(num_vehicles);
  for (std::size_t i = 0; i < num_vehicles; ++i) {
    queues_.emplace_back(static_cast<VehicleId>(i), cfg_.buffer_capacity_bytes);
  }
}

bool RanModel::enqueue_pdu(VehicleId id, std::uint32_t pdu_bytes, SimTime now, std::uint64_t frame_id,
                           std::uint32_t packet_index) {
  auto& acc = acc_.at(id);
  ++acc.submitted;
  const bool accepted = queues_.at(id).enqueue(pdu_bytes, now, frame_id, packet_index);
  if (!accepted) ++acc.dropped;
  return accepted;
}

std::vector<sim::DeliveredPdu> RanModel::schedule_tti(SimTime now, std::span<const double> wideband_snr_db) {
  require(wideband_snr_db.size() == queues_.size(), "schedule_tti: one SNR per vehicle required");
  std::size_t backlogged = 0;
  for (const auto& q : queues_) backlogged += q.backlogged() ? 1 : 0;

  const double tti_s = cfg_.tti.seconds();
  const double share_hz = backlogged > 0 ? radio_.bandwidth_hz / static_cast<double>(backlogged) : 0.0;
  const SimTime arrival = now + cfg_.tti + cfg_.core_network_delay;
  std::vector<sim::DeliveredPdu> delivered;

  for (std::size_t i = 0; i < queues_.size(); ++i) {
    auto& q = queues_[i];
    auto& acc = acc_[i];
    auto& grant = grants_[i];
    grant = TtiGrant{};
    double snr = wideband_snr_db[i];
    acc.sinr_sum += snr;
    ++acc.ttis;
    if (cfg_.snr_over_allocated_bandwidth && q.backlogged()) {
      snr += 10.0 * std::log10(radio_.bandwidth_hz / share_hz);
    }
    grant.mcs = cfg_.mcs_table.select(snr);
    acc.mcs_sum += grant.mcs.index;
    if (!q.backlogged()) continue;
    grant.share_hz = share_hz;
    if (grant.mcs.outage) continue;

    const double rate = link_rate_bps(share_hz, grant.mcs.efficiency, cfg_.mcs_table.efficiency_overhead());
    grant.budget_bytes = static_cast<std::uint64_t>(std::floor(rate * tti_s / 8.0));
    const std::size_t first = delivered.size();
    grant.served_bytes = q.serve(grant.budget_bytes, delivered);
    if (grant.budget_bytes > 0) {
      acc.prb_sum += (share_hz / radio_.bandwidth_hz) *
                     (static_cast<double>(grant.served_bytes) / static_cast<double>(grant.budget_bytes));
    }
    for (std::size_t k = first; k < delivered.size(); ++k) {
      delivered[k].arrival_time = arrival;
      acc.rlc_tx += 1;
      acc.rlc_delay_sum += (now - delivered[k].enqueue_time).seconds();
    }
  }
  return delivered;
}

void RanModel::on_pdu_received(const sim::DeliveredPdu& pdu) {
  auto& acc = acc_.at(pdu.vehicle_id);
  ++acc.rx;
  acc.rx_bytes += pdu.bytes;
  acc.pdcp_delay_sum += (pdu.arrival_time - pdu.enqueue_time).seconds();
}

LinkStatsWindow RanModel::collect_window_stats(VehicleId id, SimTime window_length) {
  auto& acc = acc_.at(id);
  LinkStatsWindow w;
  const double window_s = window_length.seconds();
  require(window_s > 0.0, "collect_window_stats: window must be positive");
  if (acc.ttis > 0) {
    w.mean_sinr_db = acc.sinr_sum / static_cast<double>(acc.ttis);
    w.mean_mcs_index = acc.mcs_sum / static_cast<double>(acc.ttis);
    w.prb_utilization = acc.prb_sum / static_cast<double>(acc.ttis);
  }
  w.rlc_queue_bytes = static_cast<double>(queues_.at(id).buffered_bytes());
  w.rlc_tx_pdus = static_cast<double>(acc.rlc_tx);
  w.rlc_mean_queue_delay_s = acc.rlc_tx > 0 ? acc.rlc_delay_sum / static_cast<double>(acc.rlc_tx) : 0.0;
  w.rlc_dropped_pdus = static_cast<double>(acc.dropped);
  w.rlc_retx = 0.0;
  w.pdcp_tx_pdus = static_cast<double>(acc.submitted);
  w.pdcp_rx_pdus = static_cast<double>(acc.rx);
  w.pdcp_mean_delay_s = acc.rx > 0 ? acc.pdcp_delay_sum / static_cast<double>(acc.rx) : 0.0;
  w.pdcp_throughput_bps = static_cast<double>(acc.rx_bytes) * 8.0 / window_s;
  w.pdcp_loss_ratio = acc.submitted > 0 ? static_cast<double>(acc.dropped) / static_cast<double>(acc.submitted) : 0.0;
  w.valid = acc.submitted > 0 || acc.rlc_tx > 0 || acc.rx > 0;
  acc = Accumulator{};
  return w;
}

}  // namespace teleran::ran
