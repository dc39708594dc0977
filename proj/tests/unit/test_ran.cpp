#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "teleran/ran/mcs_table.hpp"
#include "teleran/ran/ran_model.hpp"
#include "teleran/ran/ue_queue.hpp"
#include "teleran/sim/rng.hpp"

using namespace teleran;
using namespace teleran::ran;

namespace {

RanModel make_ran(std::size_t n, std::uint64_t capacity = 2'000'000) {
  RanConfig cfg;
  cfg.buffer_capacity_bytes = capacity;
  return RanModel(n, channel::RadioConfig{}, cfg);
}

}  // namespace

TEST(McsTable, CappedShannonEntries) {
  const auto t = McsTable::capped_shannon();
  ASSERT_EQ(t.entries().size(), 29u);
  EXPECT_DOUBLE_EQ(t.entries().front().min_snr_db, -5.0);
  EXPECT_DOUBLE_EQ(t.entries().back().min_snr_db, 23.0);
  EXPECT_NEAR(t.entries()[5].efficiency, 1.0, 1e-12);  // 0 dB -> log2(2)
  EXPECT_DOUBLE_EQ(t.entries().back().efficiency, 7.4);
}

TEST(McsTable, SelectsHighestEntryNotAboveSnr) {
  const auto t = McsTable::capped_shannon();
  EXPECT_EQ(t.select(20.0).index, 25);
  EXPECT_EQ(t.select(20.99).index, 25);
  EXPECT_NEAR(t.select(20.0).efficiency, std::log2(101.0), 1e-12);
  EXPECT_EQ(t.select(100.0).index, 28);
  EXPECT_FALSE(t.select(-5.0).outage);
  EXPECT_TRUE(t.select(-5.01).outage);
}

TEST(McsTable, MonotoneInSnr) {
  const auto t = McsTable::capped_shannon();
  double prev_eff = -1.0;
  int prev_idx = -1;
  for (double s = -10.0; s < 40.0; s += 0.05) {
    const auto sel = t.select(s);
    EXPECT_GE(sel.efficiency, prev_eff);
    EXPECT_GE(sel.index, prev_idx);
    prev_eff = sel.efficiency;
    prev_idx = sel.index;
  }
}

TEST(McsTable, RejectsMalformedTables) {
  EXPECT_THROW(McsTable({}), InputError);
  EXPECT_THROW(McsTable({{0.0, 1.0, 0}, {0.0, 2.0, 1}}), InputError);
  EXPECT_THROW(McsTable({{0.0, 2.0, 0}, {1.0, 1.0, 1}}), InputError);
  EXPECT_THROW(McsTable({{0.0, 1.0, 0}}, 1.5), InputError);
}

TEST(LinkRate, Arithmetic) { EXPECT_DOUBLE_EQ(link_rate_bps(10e6, 2.0, 0.75), 15e6); }

TEST(UeQueue, TailDropAtCapacity) {
  UeQueue q(0, 3000);
  EXPECT_TRUE(q.enqueue(1500, SimTime{}, 0, 0));
  EXPECT_TRUE(q.enqueue(1500, SimTime{}, 0, 1));
  EXPECT_FALSE(q.enqueue(1, SimTime{}, 0, 2));
  EXPECT_EQ(q.buffered_bytes(), 3000u);
  EXPECT_EQ(q.dropped_count(), 1u);
  EXPECT_EQ(q.bytes_dropped(), 1u);
}

TEST(UeQueue, ZeroSizedPduIsAContractViolation) {
  UeQueue q(0, 3000);
  EXPECT_THROW(q.enqueue(0, SimTime{}, 0, 0), ContractViolation);
}

TEST(UeQueue, ServesFifoWithPartialHead) {
  UeQueue q(4, 1 << 20);
  q.enqueue(1000, SimTime::from_millis(1), 7, 0);
  q.enqueue(1000, SimTime::from_millis(2), 7, 1);
  std::vector<sim::DeliveredPdu> out;
  EXPECT_EQ(q.serve(1500, out), 1500u);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].packet_index, 0u);
  EXPECT_EQ(out[0].vehicle_id, 4u);
  EXPECT_EQ(q.head().remaining, 500u);
  EXPECT_EQ(q.serve(10000, out), 500u);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[1].packet_index, 1u);
  EXPECT_EQ(out[1].enqueue_time, SimTime::from_millis(2));
  EXPECT_FALSE(q.backlogged());
}

TEST(RanModel, SingleVehicleBudgetArithmetic) {
  auto ran = make_ran(1);
  ran.enqueue_pdu(0, 1500, SimTime{}, 0, 0);
  const double snr[] = {20.0};
  ran.schedule_tti(SimTime{}, snr);
  const auto& g = ran.last_grants()[0];
  const double expect = std::floor(50e6 * std::log2(101.0) * 0.75 * 1e-3 / 8.0);
  EXPECT_EQ(g.budget_bytes, static_cast<std::uint64_t>(expect));
  EXPECT_EQ(g.served_bytes, 1500u);
  EXPECT_DOUBLE_EQ(g.share_hz, 50e6);
}

TEST(RanModel, ArrivalIncludesTtiAndCoreDelay) {
  auto ran = make_ran(1);
  ran.enqueue_pdu(0, 1500, SimTime::from_millis(3), 0, 0);
  const double snr[] = {20.0};
  const auto out = ran.schedule_tti(SimTime::from_millis(3), snr);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].arrival_time, SimTime::from_millis(3 + 1 + 5));
}

TEST(RanModel, EqualShareAmongBacklogged) {
  auto ran = make_ran(4);
  ran.enqueue_pdu(0, 1'000'000, SimTime{}, 0, 0);
  ran.enqueue_pdu(2, 1'000'000, SimTime{}, 1, 0);
  const double snr[] = {10.0, 10.0, 10.0, 10.0};
  ran.schedule_tti(SimTime{}, snr);
  const auto& g = ran.last_grants();
  EXPECT_DOUBLE_EQ(g[0].share_hz, 25e6);
  EXPECT_DOUBLE_EQ(g[2].share_hz, 25e6);
  EXPECT_DOUBLE_EQ(g[1].share_hz, 0.0);
  EXPECT_EQ(g[0].budget_bytes, g[2].budget_bytes);
  EXPECT_EQ(g[1].served_bytes, 0u);
}

TEST(RanModel, OutageServesNothing) {
  auto ran = make_ran(1);
  ran.enqueue_pdu(0, 1500, SimTime{}, 0, 0);
  const double snr[] = {-8.0};
  EXPECT_TRUE(ran.schedule_tti(SimTime{}, snr).empty());
  EXPECT_TRUE(ran.last_grants()[0].mcs.outage);
  EXPECT_EQ(ran.queue(0).buffered_bytes(), 1500u);
}

TEST(RanModel, SnrVectorSizeIsChecked) {
  auto ran = make_ran(2);
  const double snr[] = {10.0};
  EXPECT_THROW(ran.schedule_tti(SimTime{}, snr), ContractViolation);
}

TEST(RanModel, ConservationAndWorkConservingProperty) {
  // Random offered load and SNRs: bytes are conserved per queue, no budget is
  // left unused while a queue is backlogged, and backlogged vehicles at equal
  // SNR receive equal budgets.
  sim::RngStream rng("ran-property", 5);
  const std::size_t n = 6;
  auto ran = make_ran(n, 400'000);
  std::vector<std::uint64_t> delivered(n, 0);
  std::vector<double> snr(n);
  for (int t = 0; t < 3000; ++t) {
    const SimTime now = SimTime::from_millis(t);
    for (VehicleId v = 0; v < n; ++v) {
      if (rng.uniform() < 0.3) {
        for (int k = 0; k < 20; ++k) ran.enqueue_pdu(v, 1 + static_cast<std::uint32_t>(rng.index(1500)), now, 0, 0);
      }
    }
    const double common = rng.uniform(-3.0, 25.0);
    for (auto& s : snr) s = common;
    std::vector<bool> was_backlogged(n);
    for (VehicleId v = 0; v < n; ++v) was_backlogged[v] = ran.queue(v).backlogged();
    const auto out = ran.schedule_tti(now, snr);
    for (const auto& p : out) delivered[p.vehicle_id] += p.bytes;
    std::uint64_t reference_budget = 0;
    for (VehicleId v = 0; v < n; ++v) {
      const auto& g = ran.last_grants()[v];
      EXPECT_LE(g.served_bytes, g.budget_bytes);
      if (ran.queue(v).backlogged()) {
        EXPECT_EQ(g.served_bytes, g.budget_bytes) << "budget left idle while backlogged";
      }
      if (was_backlogged[v]) {
        if (reference_budget == 0) reference_budget = g.budget_bytes;
        EXPECT_EQ(g.budget_bytes, reference_budget);
      }
    }
  }
  for (VehicleId v = 0; v < n; ++v) {
    const auto& q = ran.queue(v);
    EXPECT_EQ(q.bytes_offered(), q.bytes_served() + q.bytes_dropped() + q.buffered_bytes());
    EXPECT_LE(delivered[v], q.bytes_served());
    EXPECT_LE(q.buffered_bytes(), q.capacity_bytes());
  }
}

TEST(RanModel, QueueDelayGrowsWithLoad) {
  auto mean_delay = [](std::uint32_t frame_bytes) {
    auto ran = make_ran(1, 10'000'000);
    const double snr[] = {5.0};
    double sum = 0.0;
    std::size_t n = 0;
    for (int t = 0; t < 2000; ++t) {
      const SimTime now = SimTime::from_millis(t);
      if (t % 100 == 0) {
        for (std::uint32_t b = 0; b < frame_bytes; b += 1500) ran.enqueue_pdu(0, 1500, now, 0, 0);
      }
      for (const auto& p : ran.schedule_tti(now, snr)) {
        sum += (p.arrival_time - p.enqueue_time).seconds();
        ++n;
      }
    }
    return sum / static_cast<double>(n);
  };
  const double small = mean_delay(18'000), mid = mean_delay(100'000), large = mean_delay(200'000);
  EXPECT_LT(small, mid);
  EXPECT_LT(mid, large);
}

TEST(RanModel, WindowStatsResetAfterCollection) {
  auto ran = make_ran(1);
  const double snr[] = {12.0};
  for (int t = 0; t < 100; ++t) {
    ran.enqueue_pdu(0, 1500, SimTime::from_millis(t), 0, static_cast<std::uint32_t>(t));
    for (const auto& p : ran.schedule_tti(SimTime::from_millis(t), snr)) ran.on_pdu_received(p);
  }
  const auto w = ran.collect_window_stats(0, SimTime::from_millis(100));
  EXPECT_TRUE(w.valid);
  EXPECT_DOUBLE_EQ(w.mean_sinr_db, 12.0);
  EXPECT_DOUBLE_EQ(w.pdcp_tx_pdus, 100.0);
  EXPECT_DOUBLE_EQ(w.pdcp_rx_pdus, 100.0);
  EXPECT_NEAR(w.pdcp_throughput_bps, 100 * 1500 * 8 / 0.1, 1e-6);
  EXPECT_NEAR(w.pdcp_mean_delay_s, 0.006, 1e-12);
  const auto empty = ran.collect_window_stats(0, SimTime::from_millis(100));
  EXPECT_FALSE(empty.valid);
  EXPECT_DOUBLE_EQ(empty.pdcp_rx_pdus, 0.0);
}

TEST(RanModel, HalfShareEveryTtiGivesHalfUtilization) {
  auto ran = make_ran(2, 100'000'000);
  const double snr[] = {15.0, 15.0};
  for (int t = 0; t < 100; ++t) {
    const SimTime now = SimTime::from_millis(t);
    if (t == 0) {
      for (VehicleId v = 0; v < 2; ++v) ran.enqueue_pdu(v, 50'000'000, now, v, 0);
    }
    ran.schedule_tti(now, snr);
  }
  EXPECT_DOUBLE_EQ(ran.collect_window_stats(0, SimTime::from_millis(100)).prb_utilization, 0.5);
}

TEST(RanModel, LossRatioCountsTailDrops) {
  auto ran = make_ran(1, 9 * 1500);
  for (std::uint32_t k = 0; k < 10; ++k) ran.enqueue_pdu(0, 1500, SimTime{}, 0, k);
  const double snr[] = {20.0};
  for (int t = 0; t < 10; ++t) {
    for (const auto& p : ran.schedule_tti(SimTime::from_millis(t), snr)) ran.on_pdu_received(p);
  }
  const auto w = ran.collect_window_stats(0, SimTime::from_millis(100));
  EXPECT_DOUBLE_EQ(w.pdcp_rx_pdus, 9.0);
  EXPECT_DOUBLE_EQ(w.rlc_dropped_pdus, 1.0);
  EXPECT_DOUBLE_EQ(w.pdcp_loss_ratio, 0.1);
}

TEST(RanModel, ZeroDbFullCarrierRate) {
  // 50e6 * log2(2) * 0.75 = 37.5 Mbit/s -> 4687 bytes per 1 ms TTI.
  auto ran = make_ran(1);
  ran.enqueue_pdu(0, 1'000'000, SimTime{}, 0, 0);
  const double snr[] = {0.0};
  ran.schedule_tti(SimTime{}, snr);
  EXPECT_EQ(ran.last_grants()[0].budget_bytes, 4687u);
}

TEST(RanModel, EmptyWindowCountersAreZero) {
  auto ran = make_ran(1);
  const double snr[] = {10.0};
  for (int t = 0; t < 100; ++t) ran.schedule_tti(SimTime::from_millis(t), snr);
  const auto w = ran.collect_window_stats(0, SimTime::from_millis(100));
  EXPECT_DOUBLE_EQ(w.prb_utilization, 0.0);
  EXPECT_DOUBLE_EQ(w.rlc_tx_pdus, 0.0);
  EXPECT_DOUBLE_EQ(w.pdcp_rx_pdus, 0.0);
  EXPECT_DOUBLE_EQ(w.pdcp_loss_ratio, 0.0);
}

TEST(UeQueue, ExactFitIsAccepted) {
  UeQueue q(0, 2'000'000);
  EXPECT_TRUE(q.enqueue(1500, SimTime{}, 0, 0));
  UeQueue exact(0, 1500);
  EXPECT_TRUE(exact.enqueue(1500, SimTime{}, 0, 0));
}
