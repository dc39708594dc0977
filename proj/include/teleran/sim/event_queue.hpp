#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "teleran/common.hpp"

namespace teleran::sim {

struct DeliveredPdu {
  VehicleId vehicle_id = 0;
  std::uint64_t frame_id = 0;
  std::uint32_t packet_index = 0;
  std::uint32_t bytes = 0;
  SimTime enqueue_time;
  SimTime arrival_time;
};

// A frame is captured (sized and counted as sent) and, after the encoding
// delay, released to the RLC queue as PDUs.
enum class FrameStage { kCapture, kRelease };

struct FrameGeneration {
  VehicleId vehicle_id = 0;
  std::uint64_t frame_id = 0;
  FrameStage stage = FrameStage::kCapture;
};
struct TtiTick {};
struct RanAiTick {};
struct PacketDelivery {
  VehicleId vehicle_id = 0;
  std::vector<DeliveredPdu> pdus;
};
struct EpisodeEnd {};

using EventPayload = std::variant<FrameGeneration, TtiTick, RanAiTick, PacketDelivery, EpisodeEnd>;

struct SimEvent {
  SimTime fire_time;
  std::uint64_t sequence_id = 0;
  EventPayload payload;
};

// Ordered event queue plus simulation clock. Events dispatch in
// (fire_time, sequence_id) order; sequence ids are assigned at scheduling time.
class EventLoop {
 public:
  using Handler = std::function<void(SimEvent&)>;

  SimTime now() const { return now_; }
  std::size_t pending() const { return heap_.size(); }

  // Throws ContractViolation when fire_time is earlier than the clock.
  std::uint64_t schedule(SimTime fire_time, EventPayload payload);

  // Dispatches every event with fire_time <= t_end, then sets the clock to
  // t_end. Handlers may schedule further events.
  std::size_t run_until(SimTime t_end, const Handler& handler);

 private:
  static bool later(const SimEvent& a, const SimEvent& b);

  SimTime now_;
  std::uint64_t next_sequence_ = 0;
  std::vector<SimEvent> heap_;
};

}  // namespace teleran::sim
