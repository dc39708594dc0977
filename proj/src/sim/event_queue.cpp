#include "teleran/sim/event_queue.hpp"

#include <algorithm>
#include <string>

namespace teleran::sim {

bool EventLoop::later(const SimEvent& a, const SimEvent& b) {
  if (a.fire_time != b.fire_time) return a.fire_time > b.fire_time;
  return a.sequence_id > b.sequence_id;
}

std::uint64_t EventLoop::schedule(SimTime fire_time, EventPayload payload) {
  if (fire_time < now_) {
    throw ContractViolation("schedule: fire time " + std::to_string(fire_time.micros()) +
                            " us is before the clock at " + std::to_string(now_.micros()) + " us");
  }
  const std::uint64_t id = next_sequence_++;
  heap_.push_back(SimEvent{fire_time, id, std::move(payload)});
  std::push_heap(heap_.begin(), heap_.end(), later);
  return id;
}

std::size_t EventLoop::run_until(SimTime t_end, const Handler& handler) {
  require(t_end >= now_, "run_until: end time is before the clock");
  std::size_t dispatched = 0;
  while (!heap_.empty() && heap_.front().fire_time <= t_end) {
    std::pop_heap(heap_.begin(), heap_.end(), later);
    SimEvent event = std::move(heap_.back());
    heap_.pop_back();
    now_ = event.fire_time;
    handler(event);
    ++dispatched;
  }
  now_ = t_end;
  return dispatched;
}

}  // namespace teleran::sim
