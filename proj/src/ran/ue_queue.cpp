#include "teleran/ran/ue_queue.hpp"

namespace teleran::ran {

UeQueue::UeQueue(VehicleId vehicle_id, std::uint64_t capacity_bytes)
    : vehicle_id_(vehicle_id), capacity_(capacity_bytes) {}

bool UeQueue::enqueue(std::uint32_t pdu_bytes, SimTime now, std::uint64_t frame_id, std::uint32_t packet_index) {
  require(pdu_bytes > 0, "enqueue_pdu: PDU size must be positive");
  bytes_offered_ += pdu_bytes;
  if (buffered_ + pdu_bytes > capacity_) {
    ++dropped_count_;
    bytes_dropped_ += pdu_bytes;
    return false;
  }
  pdus_.push_back(Pdu{pdu_bytes, pdu_bytes, now, frame_id, packet_index});
  buffered_ += pdu_bytes;
  return true;
}

std::uint64_t UeQueue::serve(std::uint64_t budget_bytes, std::vector<sim::DeliveredPdu>& completed) {
  std::uint64_t served = 0;
  while (budget_bytes > 0 && !pdus_.empty()) {
    Pdu& head = pdus_.front();
    const std::uint64_t take = std::min<std::uint64_t>(budget_bytes, head.remaining);
    head.remaining -= static_cast<std::uint32_t>(take);
    budget_bytes -= take;
    served += take;
    if (head.remaining == 0) {
      sim::DeliveredPdu done;
      done.vehicle_id = vehicle_id_;
      done.frame_id = head.frame_id;
      done.packet_index = head.packet_index;
      done.bytes = head.bytes;
      done.enqueue_time = head.enqueue_time;
      completed.push_back(done);
      pdus_.pop_front();
    }
  }
  buffered_ -= served;
  bytes_served_ += served;
  return served;
}

}  // namespace teleran::ran
