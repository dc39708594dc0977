#include "teleran/app/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "teleran/csv.hpp"

namespace teleran::app {

void FrameSizeTrace::add(std::uint64_t frame_index, SegmentationMode mode, std::uint32_t bytes) {
  sizes_[{frame_index, mode_index(mode)}] = bytes;
  period_ = std::max(period_, frame_index + 1);
}

std::optional<std::uint32_t> FrameSizeTrace::bytes(std::uint64_t frame_index, SegmentationMode mode) const {
  if (period_ == 0) return std::nullopt;
  const auto it = sizes_.find({frame_index % period_, mode_index(mode)});
  if (it == sizes_.end()) return std::nullopt;
  return it->second;
}

FrameSizeTrace load_frame_size_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("frame size trace: cannot open " + path.string());
  csv::Reader reader(in, path.string());
  reader.expect_header({"frame_index", "mode", "bytes"});
  FrameSizeTrace trace;
  while (auto row = reader.next()) {
    const auto index = reader.to_uint(*row, 0);
    SegmentationMode mode{};
    try {
      mode = parse_mode((*row)[1]);
    } catch (const InputError& e) {
      reader.fail(e.what());
    }
    const auto bytes = reader.to_uint(*row, 2);
    if (bytes == 0 || bytes > 0xffffffffULL) reader.fail("frame size must be in [1, 2^32)");
    trace.add(index, mode, static_cast<std::uint32_t>(bytes));
  }
  if (trace.empty()) throw InputError("frame size trace: " + path.string() + " has no rows");
  return trace;
}

std::uint32_t packet_count_for(std::uint32_t frame_bytes, std::uint32_t pdu_payload_bytes) {
  require(pdu_payload_bytes > 0, "pdu payload must be positive");
  return (frame_bytes + pdu_payload_bytes - 1) / pdu_payload_bytes;
}

TrafficApp::TrafficApp(std::size_t num_vehicles, SegmentationProfile profile, AppConfig cfg,
                       std::shared_ptr<const FrameSizeTrace> size_trace)
    : profile_(profile), cfg_(cfg), size_trace_(std::move(size_trace)), vehicles_(num_vehicles) {
  require(cfg_.pdu_payload_bytes > 0, "app: pdu payload must be positive");
}

Frame TrafficApp::generate_frame(VehicleId id, SegmentationMode mode, SimTime now) {
  auto& v = vehicles_.at(id);
  Frame f;
  f.frame_id = next_frame_id_++;
  f.vehicle_id = id;
  f.mode = mode;
  f.generation_time = now;
  f.bytes = profile_[mode].frame_bytes;
  if (size_trace_) {
    if (auto traced = size_trace_->bytes(v.frames_generated, mode)) f.bytes = *traced;
  }
  f.packet_count = packet_count_for(f.bytes, cfg_.pdu_payload_bytes);
  ++v.frames_generated;
  v.generated_bytes += f.bytes;
  v.window_tx += f.packet_count;
  frames_.emplace(f.frame_id, FrameState{f, std::vector<bool>(f.packet_count, false), 0});
  return f;
}

const Frame& TrafficApp::frame(std::uint64_t frame_id) const {
  const auto it = frames_.find(frame_id);
  require(it != frames_.end(), "unknown frame id");
  return it->second.frame;
}

std::vector<std::uint32_t> TrafficApp::fragment(const Frame& frame) const {
  std::vector<std::uint32_t> sizes(frame.packet_count, cfg_.pdu_payload_bytes);
  if (!sizes.empty()) sizes.back() = frame.bytes - cfg_.pdu_payload_bytes * (frame.packet_count - 1);
  return sizes;
}

void TrafficApp::on_packet_delivered(const sim::DeliveredPdu& pdu, SimTime now) {
  const auto it = frames_.find(pdu.frame_id);
  require(it != frames_.end(), "on_packet_delivered: packet references an unknown or completed frame");
  auto& state = it->second;
  require(pdu.packet_index < state.frame.packet_count, "on_packet_delivered: packet index out of range");
  require(!state.received[pdu.packet_index], "on_packet_delivered: duplicate delivery");
  state.received[pdu.packet_index] = true;
  ++state.received_count;

  auto& v = vehicles_.at(state.frame.vehicle_id);
  const double delay = (now + profile_[state.frame.mode].decode_delay - state.frame.generation_time).seconds();
  v.window_delays.push_back(delay);
  v.packet_delays.push_back(delay);
  v.window_rx_bytes += pdu.bytes;
  if (state.received_count == state.frame.packet_count) {
    ++v.window_frames_completed;
    v.frame_delays.push_back(delay);
    frames_.erase(it);
  }
}

AppKpiWindow TrafficApp::window_kpis(VehicleId id, SimTime window_length) {
  auto& v = vehicles_.at(id);
  AppKpiWindow w;
  w.n_tx = v.window_tx;
  w.n_rx = v.window_delays.size();
  w.frames_completed = v.window_frames_completed;
  w.throughput_mean_bps = static_cast<double>(v.window_rx_bytes) * 8.0 / window_length.seconds();
  if (v.window_delays.empty()) {
    w.delay_mean_s = w.delay_min_s = w.delay_max_s = cfg_.empty_window_delay_s;
    w.delay_std_s = 0.0;
  } else {
    // Shifted by the first sample so equal delays give exactly zero spread.
    const auto& d = v.window_delays;
    const double n = static_cast<double>(d.size());
    const double ref = d.front();
    double shift_mean = 0.0;
    for (double x : d) shift_mean += x - ref;
    shift_mean /= n;
    double ss = 0.0;
    for (double x : d) ss += (x - ref - shift_mean) * (x - ref - shift_mean);
    w.delay_mean_s = ref + shift_mean;
    w.delay_std_s = std::sqrt(ss / n);
    const auto [mn, mx] = std::minmax_element(d.begin(), d.end());
    w.delay_min_s = *mn;
    w.delay_max_s = *mx;
  }
  v.window_tx = 0;
  v.window_rx_bytes = 0;
  v.window_frames_completed = 0;
  v.window_delays.clear();
  return w;
}

}  // namespace teleran::app
