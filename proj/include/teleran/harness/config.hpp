#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "teleran/agents/baselines.hpp"
#include "teleran/agents/dql.hpp"
#include "teleran/agents/ppo.hpp"
#include "teleran/channel/channel_model.hpp"
#include "teleran/metrics/state.hpp"

namespace teleran::harness {

enum class PolicyKind { kConstantR, kConstantSC, kConstantSA, kDelayHeuristic, kDql, kPpo };

std::string_view policy_name(PolicyKind kind);
// Accepts C-R, C-SC, C-SA, D-S, DQL, PPO (case-insensitive).
PolicyKind parse_policy(std::string_view name);
bool is_learning(PolicyKind kind);

enum class Profile { kFull, kSmoke };
std::string_view profile_name(Profile p);
Profile parse_profile(std::string_view name);

inline constexpr std::size_t kSmokeTrainEpisodes = 200;

struct ExperimentConfig {
  // experiment
  std::size_t num_vehicles = 5;
  PolicyKind policy = PolicyKind::kPpo;
  metrics::StateConfig state_config = metrics::StateConfig::kFull;
  std::uint64_t seed = 1;
  double episode_duration_s = 80.0;
  double update_period_s = 0.1;
  Profile profile = Profile::kFull;
  std::size_t train_episodes_override = 0;  // 0: derived from N_u and profile
  std::size_t test_episodes_override = 0;
  std::size_t workers = 1;
  bool write_ticks = true;
  app::SegmentationMode initial_mode = app::SegmentationMode::kConservative;

  channel::RadioConfig radio;
  channel::MobilityConfig mobility;
  ran::RanConfig ran;
  app::AppConfig app;
  app::SegmentationProfile segmentation;
  metrics::KpiThresholds thresholds;
  metrics::DelayStatistic delay_statistic = metrics::DelayStatistic::kMean;
  agents::HeuristicParams heuristic;
  agents::DqlConfig dql;
  agents::PpoConfig ppo;

  std::string channel_trace;     // empty: parametric channel
  std::string frame_size_trace;  // empty: fixed sizes per mode

  // floor(10^4 / N_u) (200 under the smoke profile); 0 for non-learning policies.
  std::size_t train_episodes() const;
  // floor(500 / N_u), at least 1.
  std::size_t test_episodes() const;

  SimTime episode_duration() const { return SimTime::from_seconds(episode_duration_s); }
  SimTime update_period() const { return SimTime::from_seconds(update_period_s); }
  std::uint64_t ticks_per_episode() const;

  // Throws InputError naming the offending key.
  void validate() const;
};

nlohmann::ordered_json to_json(const ExperimentConfig& cfg);
// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const ExperimentConfig& cfg);

// Applies "section.key=value"; the value is parsed as JSON when possible and
// taken as a string otherwise.
void apply_override(ExperimentConfig& cfg, std::string_view assignment);

// Built-in presets: "default" and "smoke".
ExperimentConfig preset(std::string_view name);

// Fresh policy for the configuration; `seed` drives network init and
// exploration.
std::unique_ptr<agents::Policy> make_policy(const ExperimentConfig& cfg, std::uint64_t seed);

}  // namespace teleran::harness
