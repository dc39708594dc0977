#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "teleran/app/traffic.hpp"
#include "teleran/channel/trace.hpp"
#include "teleran/harness/config.hpp"
#include "teleran/orchestrator/ran_ai.hpp"

namespace teleran::harness {

inline constexpr std::array<double, 5> kDigestQuantiles{0.05, 0.25, 0.5, 0.75, 0.95};

// Inputs shared read-only by every episode of a campaign.
struct EpisodeResources {
  std::shared_ptr<const channel::ChannelTrace> channel_trace;
  std::shared_ptr<const app::FrameSizeTrace> frame_sizes;
};

EpisodeResources load_resources(const ExperimentConfig& cfg);

struct VehicleEpisodeStats {
  VehicleId vehicle_id = 0;
  std::uint64_t windows = 0;
  double reward_sum = 0.0;
  double qos_sum = 0.0;
  double qoe_sum = 0.0;
  std::vector<double> window_delays_s;  // per-window mean packet delay
  std::vector<double> window_prp;
  std::array<std::uint64_t, app::kNumModes> mode_counts{};
  // Packet-level end-to-end delay quantiles p5, p25, p50, p75, p95 over the
  // episode; the empty-window sentinel when nothing was delivered.
  std::array<double, 5> packet_delay_quantiles{};

  double mean_reward() const { return windows ? reward_sum / static_cast<double>(windows) : 0.0; }
  double mean_qos() const { return windows ? qos_sum / static_cast<double>(windows) : 0.0; }
  double mean_qoe() const { return windows ? qoe_sum / static_cast<double>(windows) : 0.0; }
};

// Byte accounting of one vehicle at the end of an episode.
struct ByteLedger {
  std::uint64_t generated = 0;        // frame bytes captured
  std::uint64_t enqueued = 0;         // offered to the RLC buffer
  std::uint64_t served = 0;           // sent over the air
  std::uint64_t dropped = 0;          // tail-dropped at the RLC buffer
  std::uint64_t queued_at_end = 0;
  std::uint64_t received = 0;         // reached the remote driver
  std::uint64_t awaiting_release = 0; // captured but still encoding
  std::uint64_t in_flight = 0;        // completed PDUs not yet delivered
  std::uint64_t head_progress = 0;    // bytes already sent of a partially served head PDU

  bool conserved() const {
    return enqueued == served + dropped + queued_at_end && served == received + in_flight + head_progress &&
           generated == enqueued + awaiting_release;
  }
};

struct EpisodeResult {
  std::uint64_t episode_index = 0;
  std::uint64_t episode_seed = 0;
  std::vector<VehicleEpisodeStats> vehicles;
  std::vector<ByteLedger> bytes;
  std::uint64_t events_dispatched = 0;

  double mean_reward() const;
  double mean_qos() const;
  double mean_qoe() const;
};

using TickSink = std::function<void(std::uint64_t episode_index, const orchestrator::TickRecord&)>;

// Builds a fresh cell, runs one episode and returns its digests. In train
// mode the policy explores and learns; in test mode it acts greedily and is
// never fed transitions.
EpisodeResult run_episode(const ExperimentConfig& cfg, agents::Policy& policy, bool train,
                          std::uint64_t episode_index, std::uint64_t episode_seed,
                          const EpisodeResources& resources = {}, const TickSink& sink = {});

// Linear-interpolation quantile between order statistics, q in [0, 1].
// Copies and sorts the input; requires a non-empty sample.
double quantile(std::vector<double> samples, double q);

std::uint64_t train_episode_seed(std::uint64_t master_seed, std::uint64_t index);
std::uint64_t test_episode_seed(std::uint64_t master_seed, std::uint64_t index);

}  // namespace teleran::harness
