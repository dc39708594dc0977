#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "teleran/common.hpp"
#include "teleran/sim/event_queue.hpp"

namespace teleran::ran {

struct Pdu {
  std::uint32_t bytes = 0;
  std::uint32_t remaining = 0;
  SimTime enqueue_time;
  std::uint64_t frame_id = 0;
  std::uint32_t packet_index = 0;
};

// FIFO RLC transmit buffer with tail drop.
class UeQueue {
 public:
  UeQueue(VehicleId vehicle_id, std::uint64_t capacity_bytes);

  VehicleId vehicle_id() const { return vehicle_id_; }
  std::uint64_t capacity_bytes() const { return capacity_; }
  std::uint64_t buffered_bytes() const { return buffered_; }
  std::size_t pdu_count() const { return pdus_.size(); }
  bool backlogged() const { return buffered_ > 0; }
  const Pdu& head() const { return pdus_.front(); }

  std::uint64_t dropped_count() const { return dropped_count_; }
  std::uint64_t retransmission_count() const { return retransmission_count_; }

  std::uint64_t bytes_offered() const { return bytes_offered_; }
  std::uint64_t bytes_served() const { return bytes_served_; }
  std::uint64_t bytes_dropped() const { return bytes_dropped_; }

  // Appends the PDU when it fits (<= capacity); otherwise tail-drops it.
  bool enqueue(std::uint32_t pdu_bytes, SimTime now, std::uint64_t frame_id, std::uint32_t packet_index);

  // Transmits up to budget_bytes from the head of the queue. Completed PDUs
  // are appended to `completed` with arrival_time unset. Returns bytes served.
  std::uint64_t serve(std::uint64_t budget_bytes, std::vector<sim::DeliveredPdu>& completed);

 private:
  VehicleId vehicle_id_;
  std::uint64_t capacity_;
  std::uint64_t buffered_ = 0;
  std::deque<Pdu> pdus_;
  std::uint64_t dropped_count_ = 0;
  std::uint64_t retransmission_count_ = 0;
  std::uint64_t bytes_offered_ = 0;
  std::uint64_t bytes_served_ = 0;
  std::uint64_t bytes_dropped_ = 0;
};

}  // namespace teleran::ran
