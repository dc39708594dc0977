#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "teleran/app/segmentation.hpp"
#include "teleran/sim/event_queue.hpp"

namespace teleran::app {

struct Frame {
  std::uint64_t frame_id = 0;
  VehicleId vehicle_id = 0;
  SegmentationMode mode = SegmentationMode::kRaw;
  SimTime generation_time;
  std::uint32_t bytes = 0;
  std::uint32_t packet_count = 0;
};

struct AppConfig {
  std::uint32_t pdu_payload_bytes = 1500;
  SimTime frame_period = SimTime::from_millis(100);
  // Delay statistics reported for windows where nothing was delivered.
  double empty_window_delay_s = 0.100;
};

// Per-vehicle application KPIs over one RAN-AI window.
struct AppKpiWindow {
  std::uint64_t n_tx = 0;
  std::uint64_t n_rx = 0;
  double delay_mean_s = 0.0;
  double delay_std_s = 0.0;
  double delay_min_s = 0.0;
  double delay_max_s = 0.0;
  double throughput_mean_bps = 0.0;
  std::uint64_t frames_completed = 0;
};

// Empirical frame sizes keyed by (frame_index, mode); replays cyclically.
class FrameSizeTrace {
 public:
  void add(std::uint64_t frame_index, SegmentationMode mode, std::uint32_t bytes);
  std::optional<std::uint32_t> bytes(std::uint64_t frame_index, SegmentationMode mode) const;
  bool empty() const { return sizes_.empty(); }

 private:
  std::map<std::pair<std::uint64_t, std::size_t>, std::uint32_t> sizes_;
  std::uint64_t period_ = 0;
};

// Reads the `frame_index,mode,bytes` CSV format.
FrameSizeTrace load_frame_size_trace(const std::filesystem::path& path);

std::uint32_t packet_count_for(std::uint32_t frame_bytes, std::uint32_t pdu_payload_bytes);

// LiDAR traffic source and remote-driver sink for all vehicles of one episode.
class TrafficApp {
 public:
  TrafficApp(std::size_t num_vehicles, SegmentationProfile profile, AppConfig cfg,
             std::shared_ptr<const FrameSizeTrace> size_trace = nullptr);

  const SegmentationProfile& profile() const { return profile_; }
  const AppConfig& config() const { return cfg_; }

  // Creates the next frame of a vehicle; its packets count towards N_tx of
  // the current window immediately.
  Frame generate_frame(VehicleId id, SegmentationMode mode, SimTime now);
  const Frame& frame(std::uint64_t frame_id) const;

  // Payload sizes of the PDUs a frame fragments into.
  std::vector<std::uint32_t> fragment(const Frame& frame) const;

  // Records a packet reaching the application. Throws ContractViolation for
  // unknown frames and duplicate deliveries.
  void on_packet_delivered(const sim::DeliveredPdu& pdu, SimTime now);

  // Closes the window of one vehicle and resets its accumulators.
  AppKpiWindow window_kpis(VehicleId id, SimTime window_length);

  // Episode-level samples.
  const std::vector<double>& packet_delays(VehicleId id) const { return vehicles_.at(id).packet_delays; }
  const std::vector<double>& frame_delays(VehicleId id) const { return vehicles_.at(id).frame_delays; }
  std::uint64_t generated_bytes(VehicleId id) const { return vehicles_.at(id).generated_bytes; }
  std::uint64_t frames_generated(VehicleId id) const { return vehicles_.at(id).frames_generated; }

 private:
  struct FrameState {
    Frame frame;
    std::vector<bool> received;
    std::uint32_t received_count = 0;
  };
  struct VehicleState {
    std::uint64_t frames_generated = 0;
    std::uint64_t generated_bytes = 0;
    std::uint64_t window_tx = 0;
    std::uint64_t window_rx_bytes = 0;
    std::uint64_t window_frames_completed = 0;
    std::vector<double> window_delays;
    std::vector<double> packet_delays;
    std::vector<double> frame_delays;
  };

  SegmentationProfile profile_;
  AppConfig cfg_;
  std::shared_ptr<const FrameSizeTrace> size_trace_;
  std::uint64_t next_frame_id_ = 0;
  std::unordered_map<std::uint64_t, FrameState> frames_;
  std::vector<VehicleState> vehicles_;
};

}  // namespace teleran::app
