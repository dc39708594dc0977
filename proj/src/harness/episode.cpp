#include "teleran/harness/episode.hpp"

#include <algorithm>
#include <map>

#include "teleran/channel/channel_model.hpp"
#include "teleran/ran/ran_model.hpp"
#include "teleran/sim/event_queue.hpp"

namespace teleran::harness {

EpisodeResources load_resources(const ExperimentConfig& cfg) {
  EpisodeResources r;
  if (!cfg.channel_trace.empty()) {
    r.channel_trace =
        std::make_shared<const channel::ChannelTrace>(channel::load_trace(cfg.channel_trace, cfg.episode_duration_s));
  }
  if (!cfg.frame_size_trace.empty()) {
    r.frame_sizes = std::make_shared<const app::FrameSizeTrace>(app::load_frame_size_trace(cfg.frame_size_trace));
  }
  return r;
}

double EpisodeResult::mean_reward() const {
  double s = 0.0;
  std::uint64_t n = 0;
  for (const auto& v : vehicles) {
    s += v.reward_sum;
    n += v.windows;
  }
  return n ? s / static_cast<double>(n) : 0.0;
}

double EpisodeResult::mean_qos() const {
  double s = 0.0;
  std::uint64_t n = 0;
  for (const auto& v : vehicles) {
    s += v.qos_sum;
    n += v.windows;
  }
  return n ? s / static_cast<double>(n) : 0.0;
}

double EpisodeResult::mean_qoe() const {
  double s = 0.0;
  std::uint64_t n = 0;
  for (const auto& v : vehicles) {
    s += v.qoe_sum;
    n += v.windows;
  }
  return n ? s / static_cast<double>(n) : 0.0;
}

double quantile(std::vector<double> samples, double q) {
  require(!samples.empty(), "quantile: empty sample");
  require(q >= 0.0 && q <= 1.0, "quantile: q outside [0, 1]");
  std::sort(samples.begin(), samples.end());
  const double h = q * static_cast<double>(samples.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  const std::size_t hi = std::min(lo + 1, samples.size() - 1);
  return samples[lo] + (h - static_cast<double>(lo)) * (samples[hi] - samples[lo]);
}

std::uint64_t train_episode_seed(std::uint64_t master_seed, std::uint64_t index) {
  return sim::derive_seed(master_seed, "train-episode", index);
}

std::uint64_t test_episode_seed(std::uint64_t master_seed, std::uint64_t index) {
  return sim::derive_seed(master_seed, "test-episode", index);
}

namespace {

class CellMeasurements final : public orchestrator::MeasurementSource {
 public:
  CellMeasurements(app::TrafficApp& app, ran::RanModel& ran) : app_(app), ran_(ran) {}
  app::AppKpiWindow close_app_window(VehicleId id, SimTime len) override { return app_.window_kpis(id, len); }
  ran::LinkStatsWindow close_link_window(VehicleId id, SimTime len) override {
    return ran_.collect_window_stats(id, len);
  }

 private:
  app::TrafficApp& app_;
  ran::RanModel& ran_;
};

std::unique_ptr<channel::ChannelModel> make_channel(const ExperimentConfig& cfg, const EpisodeResources& res,
                                                    std::uint64_t seed) {
  if (res.channel_trace) return std::make_unique<channel::TraceChannel>(res.channel_trace, cfg.num_vehicles);
  return std::make_unique<channel::ParametricChannel>(cfg.num_vehicles, cfg.radio, cfg.mobility, seed);
}

}  // namespace

EpisodeResult run_episode(const ExperimentConfig& cfg, agents::Policy& policy, bool train,
                          std::uint64_t episode_index, std::uint64_t episode_seed, const EpisodeResources& resources,
                          const TickSink& sink) {
  require(!train || policy.learns(), "run_episode: train mode needs a learning policy");
  const std::size_t n = cfg.num_vehicles;
  const SimTime t_end = cfg.episode_duration();
  const SimTime tti = cfg.ran.tti;

  auto channel = make_channel(cfg, resources, episode_seed);
  ran::RanModel ran(n, cfg.radio, cfg.ran);
  app::TrafficApp traffic(n, cfg.segmentation, cfg.app, resources.frame_sizes);
  sim::RngStream fading("fading", episode_seed);
  CellMeasurements measurements(traffic, ran);

  orchestrator::RanAiConfig ai_cfg;
  ai_cfg.state_config = cfg.state_config;
  ai_cfg.scales = metrics::NormalizationScales::defaults_for(cfg.thresholds, cfg.segmentation, cfg.app, cfg.ran);
  ai_cfg.thresholds = cfg.thresholds;
  ai_cfg.profile = cfg.segmentation;
  ai_cfg.delay_statistic = cfg.delay_statistic;
  ai_cfg.update_period = cfg.update_period();
  ai_cfg.initial_mode = cfg.initial_mode;
  ai_cfg.learning = train;
  ai_cfg.explore = train;
  orchestrator::RanAi ai(ai_cfg, policy);
  for (std::size_t i = 0; i < n; ++i) ai.register_vehicle(static_cast<VehicleId>(i));

  EpisodeResult result;
  result.episode_index = episode_index;
  result.episode_seed = episode_seed;
  result.vehicles.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.vehicles[i].vehicle_id = static_cast<VehicleId>(i);

  ai.set_tick_logger([&](const orchestrator::TickRecord& rec) {
    auto& v = result.vehicles.at(rec.observation.vehicle_id);
    const auto& o = rec.observation;
    ++v.windows;
    v.reward_sum += o.reward;
    v.qos_sum += o.qos;
    v.qoe_sum += o.qoe;
    v.window_delays_s.push_back(o.app.delay_mean_s);
    v.window_prp.push_back(o.prp);
    ++v.mode_counts[app::mode_index(o.mode)];
    if (sink) sink(episode_index, rec);
  });

  std::vector<std::uint64_t> awaiting(n, 0);
  std::vector<std::uint64_t> in_flight(n, 0);
  std::vector<std::uint64_t> received(n, 0);
  std::vector<double> snr(n, 0.0);

  sim::EventLoop loop;
  loop.schedule(t_end, sim::EpisodeEnd{});
  ai.begin_episode();
  loop.schedule(SimTime{}, sim::RanAiTick{});
  for (std::size_t i = 0; i < n; ++i) {
    loop.schedule(SimTime{}, sim::FrameGeneration{static_cast<VehicleId>(i), 0, sim::FrameStage::kCapture});
  }
  loop.schedule(SimTime{}, sim::TtiTick{});

  auto handler = [&](sim::SimEvent& ev) {
    const SimTime now = loop.now();
    std::visit(
        [&](auto& e) {
          using E = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<E, sim::TtiTick>) {
            channel->advance_to(now);
            for (std::size_t i = 0; i < n; ++i) {
              snr[i] = channel::snr_db(channel->pathloss_db(static_cast<VehicleId>(i)), cfg.radio.bandwidth_hz,
                                       cfg.radio);
              if (cfg.radio.fading_jitter_db > 0.0) snr[i] += fading.normal(0.0, cfg.radio.fading_jitter_db);
            }
            auto done = ran.schedule_tti(now, snr);
            std::map<VehicleId, sim::PacketDelivery> batches;
            for (auto& pdu : done) {
              in_flight[pdu.vehicle_id] += pdu.bytes;
              auto& b = batches[pdu.vehicle_id];
              b.vehicle_id = pdu.vehicle_id;
              b.pdus.push_back(pdu);
            }
            for (auto& [id, b] : batches) {
              const SimTime arrival = b.pdus.front().arrival_time;
              loop.schedule(arrival, std::move(b));
            }
            if (now + tti < t_end) loop.schedule(now + tti, sim::TtiTick{});
          } else if constexpr (std::is_same_v<E, sim::PacketDelivery>) {
            for (const auto& pdu : e.pdus) {
              ran.on_pdu_received(pdu);
              traffic.on_packet_delivered(pdu, now);
              in_flight[pdu.vehicle_id] -= pdu.bytes;
              received[pdu.vehicle_id] += pdu.bytes;
            }
          } else if constexpr (std::is_same_v<E, sim::FrameGeneration>) {
            if (e.stage == sim::FrameStage::kCapture) {
              const auto frame = traffic.generate_frame(e.vehicle_id, ai.mode(e.vehicle_id), now);
              awaiting[e.vehicle_id] += frame.bytes;
              loop.schedule(now + cfg.segmentation[frame.mode].encode_delay,
                            sim::FrameGeneration{e.vehicle_id, frame.frame_id, sim::FrameStage::kRelease});
              if (now + cfg.app.frame_period < t_end) {
                loop.schedule(now + cfg.app.frame_period,
                              sim::FrameGeneration{e.vehicle_id, 0, sim::FrameStage::kCapture});
              }
            } else {
              const auto& frame = traffic.frame(e.frame_id);
              const auto sizes = traffic.fragment(frame);
              for (std::uint32_t k = 0; k < sizes.size(); ++k) {
                ran.enqueue_pdu(e.vehicle_id, sizes[k], now, frame.frame_id, k);
              }
              awaiting[e.vehicle_id] -= frame.bytes;
            }
          } else if constexpr (std::is_same_v<E, sim::RanAiTick>) {
            ai.on_update_tick(measurements);
            if (now + cfg.update_period() < t_end) loop.schedule(now + cfg.update_period(), sim::RanAiTick{});
          } else if constexpr (std::is_same_v<E, sim::EpisodeEnd>) {
            ai.on_episode_end(measurements);
          }
        },
        ev.payload);
  };
  result.events_dispatched = loop.run_until(t_end, handler);

  result.bytes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& q = ran.queue(static_cast<VehicleId>(i));
    auto& b = result.bytes[i];
    b.generated = traffic.generated_bytes(static_cast<VehicleId>(i));
    b.enqueued = q.bytes_offered();
    b.served = q.bytes_served();
    b.dropped = q.bytes_dropped();
    b.queued_at_end = q.buffered_bytes();
    b.received = received[i];
    b.awaiting_release = awaiting[i];
    b.in_flight = in_flight[i];
    if (q.pdu_count() > 0) b.head_progress = q.head().bytes - q.head().remaining;

    const auto& delays = traffic.packet_delays(static_cast<VehicleId>(i));
    auto& digest = result.vehicles[i].packet_delay_quantiles;
    for (std::size_t k = 0; k < digest.size(); ++k) {
      digest[k] = delays.empty() ? cfg.app.empty_window_delay_s : quantile(delays, kDigestQuantiles[k]);
    }
  }
  return result;
}

}  // namespace teleran::harness
