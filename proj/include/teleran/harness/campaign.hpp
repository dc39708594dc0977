#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "teleran/harness/episode.hpp"

namespace teleran::harness {

inline const std::vector<std::string> kTickColumns{
    "episode", "step", "vehicle_id", "mode", "delay_mean_s", "delay_min_s", "delay_max_s",
    "prp",     "qos",  "qoe",        "reward", "sinr_db",   "mcs",         "prb_util"};
inline const std::vector<std::string> kEpisodeColumns{
    "episode",     "vehicle_id",  "mean_reward", "mean_qos", "mean_qoe", "p50_delay_s",
    "p95_delay_s", "p50_prp",     "share_R",     "share_SC", "share_SA"};
inline const std::vector<std::string> kTrainEpisodeColumns{"episode",  "mean_reward", "mean_qos", "mean_qoe",
                                                           "share_R", "share_SC",    "share_SA"};
inline const std::vector<std::string> kSummaryColumns{
    "policy",      "num_vehicles", "tx_power_dbm", "state_config", "seed",        "episodes",
    "mean_reward", "mean_qos",     "mean_qoe",     "p5_delay_s",   "p25_delay_s", "p50_delay_s",
    "p75_delay_s", "p95_delay_s",  "p5_prp",       "p25_prp",      "p50_prp",     "p75_prp",
    "p95_prp",     "share_R",      "share_SC",     "share_SA"};

// Aggregates window rows of one configuration into a summary row.
class SummaryAccumulator {
 public:
  void add(double delay_s, double prp, int qos, double qoe, double reward, app::SegmentationMode mode);
  std::size_t rows() const { return delays_.size(); }

  void write_row(std::ostream& out, const ExperimentConfig& cfg, std::uint64_t episodes) const;

 private:
  std::vector<double> delays_;
  std::vector<double> prps_;
  double reward_sum_ = 0.0;
  double qos_sum_ = 0.0;
  double qoe_sum_ = 0.0;
  std::array<std::uint64_t, app::kNumModes> modes_{};
};

struct CampaignOutputs {
  std::filesystem::path dir;
  std::size_t train_episodes = 0;
  std::size_t test_episodes = 0;
  double test_mean_reward = 0.0;
  double test_mean_qos = 0.0;
  double test_mean_qoe = 0.0;
  std::uint64_t parameter_checksum = 0;
};

// Trains (learning policies only) and tests one configuration, writing
// config.json, train_episodes.csv, ticks.csv, episodes.csv, summary.csv,
// manifest.json and checkpoints/ under `out_dir`.
CampaignOutputs run_campaign(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                             std::ostream* progress = nullptr);

// Directories below (and including) `root` holding config.json and ticks.csv.
std::vector<std::filesystem::path> find_run_dirs(const std::filesystem::path& root);

// Recomputes one summary row per run directory from its CSVs and writes
// them to root/summary.csv. Returns the number of rows.
std::size_t summarize(const std::filesystem::path& root);

struct ReplayReport {
  std::vector<std::string> compared;
  std::vector<std::string> differing;
  bool identical() const { return differing.empty(); }
};

// Re-runs the campaign recorded in `run_dir` into a scratch directory and
// compares every output file byte for byte.
ReplayReport replay_check(const std::filesystem::path& run_dir);

}  // namespace teleran::harness
