#include "teleran/harness/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "teleran/csv.hpp"

namespace teleran::harness {

namespace fs = std::filesystem;

void SummaryAccumulator::add(double delay_s, double prp, int qos, double qoe, double reward,
                             app::SegmentationMode mode) {
  delays_.push_back(delay_s);
  prps_.push_back(prp);
  qos_sum_ += qos;
  qoe_sum_ += qoe;
  reward_sum_ += reward;
  ++modes_[app::mode_index(mode)];
}

void SummaryAccumulator::write_row(std::ostream& out, const ExperimentConfig& cfg, std::uint64_t episodes) const {
  require(!delays_.empty(), "summary: no rows to aggregate");
  const double n = static_cast<double>(delays_.size());
  csv::Writer w(out, kSummaryColumns, false);
  w.field(policy_name(cfg.policy))
      .field(static_cast<std::uint64_t>(cfg.num_vehicles))
      .field(cfg.radio.tx_power_dbm)
      .field(metrics::state_config_name(cfg.state_config))
      .field(cfg.seed)
      .field(episodes)
      .field(reward_sum_ / n)
      .field(qos_sum_ / n)
      .field(qoe_sum_ / n);
  for (double q : {0.05, 0.25, 0.5, 0.75, 0.95}) w.field(quantile(delays_, q));
  for (double q : {0.05, 0.25, 0.5, 0.75, 0.95}) w.field(quantile(prps_, q));
  for (auto c : modes_) w.field(static_cast<double>(c) / n);
  w.end_row();
}

namespace {

void write_header(std::ostream& out, const std::vector<std::string>& cols) {
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InputError("cannot write " + p.string());
  return out;
}

void write_tick_row(csv::Writer& w, std::uint64_t episode, const orchestrator::TickRecord& r) {
  const auto& o = r.observation;
  w.field(episode)
      .field(r.step)
      .field(static_cast<std::uint64_t>(o.vehicle_id))
      .field(app::mode_name(o.mode))
      .field(o.app.delay_mean_s)
      .field(o.app.delay_min_s)
      .field(o.app.delay_max_s)
      .field(o.prp)
      .field(o.qos)
      .field(o.qoe)
      .field(o.reward)
      .field(o.link.mean_sinr_db)
      .field(o.link.mean_mcs_index)
      .field(o.link.prb_utilization);
  w.end_row();
}

std::array<double, app::kNumModes> shares(const std::array<std::uint64_t, app::kNumModes>& counts) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  std::array<double, app::kNumModes> s{};
  for (std::size_t i = 0; i < counts.size(); ++i) s[i] = total ? static_cast<double>(counts[i]) / total : 0.0;
  return s;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

struct WindowRow {
  double delay_s;
  double prp;
  int qos;
  double qoe;
  double reward;
  app::SegmentationMode mode;
};

struct TestEpisodeOutput {
  EpisodeResult result;
  std::string tick_rows;
  std::vector<WindowRow> rows;
};

}  // namespace

CampaignOutputs run_campaign(const ExperimentConfig& cfg, const fs::path& out_dir, std::ostream* progress) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw InputError("cannot create " + out_dir.string() + ": " + ec.message());
  save_config(out_dir / "config.json", cfg);

  const auto resources = load_resources(cfg);
  auto policy = make_policy(cfg, sim::derive_seed(cfg.seed, "agent"));

  CampaignOutputs outputs;
  outputs.dir = out_dir;
  outputs.train_episodes = cfg.train_episodes();
  outputs.test_episodes = cfg.test_episodes();

  {
    auto out = open_out(out_dir / "train_episodes.csv");
    csv::Writer w(out, kTrainEpisodeColumns);
    const std::size_t every = std::max<std::size_t>(1, outputs.train_episodes / 10);
    for (std::size_t i = 0; i < outputs.train_episodes; ++i) {
      const auto res = run_episode(cfg, *policy, true, i, train_episode_seed(cfg.seed, i), resources);
      std::array<std::uint64_t, app::kNumModes> counts{};
      for (const auto& v : res.vehicles) {
        for (std::size_t m = 0; m < counts.size(); ++m) counts[m] += v.mode_counts[m];
      }
      const auto s = shares(counts);
      w.field(static_cast<std::uint64_t>(i)).field(res.mean_reward()).field(res.mean_qos()).field(res.mean_qoe());
      for (double x : s) w.field(x);
      w.end_row();
      if (progress && ((i + 1) % every == 0 || i + 1 == outputs.train_episodes)) {
        *progress << policy_name(cfg.policy) << " train " << (i + 1) << "/" << outputs.train_episodes
                   << " mean_reward=" << res.mean_reward() << '\n';
      }
    }
    if (!out) throw InputError("write failed: " + (out_dir / "train_episodes.csv").string());
  }

  const fs::path ckpt_dir = out_dir / "checkpoints";
  fs::create_directories(ckpt_dir);
  policy->save(ckpt_dir);
  const std::uint64_t checksum = policy->parameter_checksum();
  outputs.parameter_checksum = checksum;

  // Test phase: frozen copies, episodes spread over workers, results merged
  // in episode order so the files do not depend on the worker count.
  std::vector<TestEpisodeOutput> tests(outputs.test_episodes);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&]() {
    try {
      auto frozen = policy->frozen_copy();
      require(frozen->parameter_checksum() == checksum, "test phase: frozen copy differs from trained policy");
      for (std::size_t i = next++; i < tests.size(); i = next++) {
        auto& slot = tests[i];
        std::ostringstream rows;
        csv::Writer w(rows, kTickColumns, false);
        const bool keep_ticks = cfg.write_ticks;
        slot.result = run_episode(cfg, *frozen, false, i, test_episode_seed(cfg.seed, i), resources,
                                  [&](std::uint64_t ep, const orchestrator::TickRecord& r) {
                                    if (keep_ticks) write_tick_row(w, ep, r);
                                    const auto& o = r.observation;
                                    slot.rows.push_back({o.app.delay_mean_s, o.prp, o.qos, o.qoe, o.reward, o.mode});
                                  });
        slot.tick_rows = rows.str();
      }
      require(frozen->parameter_checksum() == checksum, "test phase: parameters changed during evaluation");
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };
  const std::size_t nworkers = std::min(cfg.workers, std::max<std::size_t>(1, tests.size()));
  if (nworkers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < nworkers; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  require(policy->parameter_checksum() == checksum, "test phase: trained parameters changed");

  SummaryAccumulator summary;
  double reward_sum = 0.0, qos_sum = 0.0, qoe_sum = 0.0;
  std::uint64_t windows = 0;
  {
    auto ticks = open_out(out_dir / "ticks.csv");
    write_header(ticks, kTickColumns);
    auto episodes = open_out(out_dir / "episodes.csv");
    csv::Writer ew(episodes, kEpisodeColumns);
    for (auto& t : tests) {
      ticks << t.tick_rows;
      for (const auto& r : t.rows) summary.add(r.delay_s, r.prp, r.qos, r.qoe, r.reward, r.mode);
      for (const auto& v : t.result.vehicles) {
        reward_sum += v.reward_sum;
        qos_sum += v.qos_sum;
        qoe_sum += v.qoe_sum;
        windows += v.windows;
        const auto s = shares(v.mode_counts);
        ew.field(t.result.episode_index)
            .field(static_cast<std::uint64_t>(v.vehicle_id))
            .field(v.mean_reward())
            .field(v.mean_qos())
            .field(v.mean_qoe())
            .field(v.packet_delay_quantiles[2])
            .field(v.packet_delay_quantiles[4])
            .field(quantile(v.window_prp, 0.5));
        for (double x : s) ew.field(x);
        ew.end_row();
      }
      t = TestEpisodeOutput{};
    }
    if (!ticks || !episodes) throw InputError("write failed in " + out_dir.string());
  }
  {
    auto out = open_out(out_dir / "summary.csv");
    write_header(out, kSummaryColumns);
    summary.write_row(out, cfg, outputs.test_episodes);
  }
  const double n = windows ? static_cast<double>(windows) : 1.0;
  outputs.test_mean_reward = reward_sum / n;
  outputs.test_mean_qos = qos_sum / n;
  outputs.test_mean_qoe = qoe_sum / n;

  {
    nlohmann::ordered_json m;
    m["policy"] = policy_name(cfg.policy);
    m["num_vehicles"] = cfg.num_vehicles;
    m["tx_power_dbm"] = cfg.radio.tx_power_dbm;
    m["state_config"] = metrics::state_config_name(cfg.state_config);
    m["seed"] = cfg.seed;
    m["train_episodes"] = outputs.train_episodes;
    m["test_episodes"] = outputs.test_episodes;
    m["parameter_checksum"] = hex64(checksum);
    m["files"] = {"config.json", "train_episodes.csv", "ticks.csv", "episodes.csv", "summary.csv", "checkpoints/"};
    auto out = open_out(out_dir / "manifest.json");
    out << m.dump(2) << '\n';
  }
  if (progress) {
    *progress << policy_name(cfg.policy) << " test " << outputs.test_episodes
              << " episodes mean_reward=" << outputs.test_mean_reward << " mean_qos=" << outputs.test_mean_qos << '\n';
  }
  return outputs;
}

std::vector<fs::path> find_run_dirs(const fs::path& root) {
  if (!fs::is_directory(root)) throw InputError("not a directory: " + root.string());
  std::vector<fs::path> dirs;
  auto is_run = [](const fs::path& d) { return fs::exists(d / "config.json") && fs::exists(d / "ticks.csv"); };
  if (is_run(root)) dirs.push_back(root);
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_directory() && is_run(entry.path())) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

std::size_t summarize(const fs::path& root) {
  const auto dirs = find_run_dirs(root);
  if (dirs.empty()) throw InputError("no run directories (config.json + ticks.csv) under " + root.string());
  std::ostringstream rows;
  write_header(rows, kSummaryColumns);
  for (const auto& dir : dirs) {
    const auto cfg = load_config(dir / "config.json");
    const fs::path path = dir / "ticks.csv";
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    csv::Reader reader(in, path.string());
    const auto header = reader.read_header();
    std::vector<std::size_t> col(kTickColumns.size());
    for (std::size_t k = 0; k < kTickColumns.size(); ++k) {
      const auto it = std::find(header.begin(), header.end(), kTickColumns[k]);
      if (it == header.end()) reader.fail("missing column '" + kTickColumns[k] + "'");
      col[k] = static_cast<std::size_t>(it - header.begin());
    }
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (std::find(kTickColumns.begin(), kTickColumns.end(), header[k]) == kTickColumns.end()) {
        reader.fail("unexpected column '" + header[k] + "'");
      }
    }
    SummaryAccumulator acc;
    std::set<std::uint64_t> episodes;
    while (auto row = reader.next()) {
      episodes.insert(reader.to_uint(*row, col[0]));
      app::SegmentationMode mode;
      try {
        mode = app::parse_mode((*row)[col[3]]);
      } catch (const InputError&) {
        reader.fail("bad value in column 'mode'");
      }
      const auto qos = reader.to_uint(*row, col[8]);
      if (qos > 1) reader.fail("bad value in column 'qos'");
      acc.add(reader.to_double(*row, col[4]), reader.to_double(*row, col[7]), static_cast<int>(qos),
              reader.to_double(*row, col[9]), reader.to_double(*row, col[10]), mode);
    }
    if (acc.rows() == 0) throw InputError(path.string() + ": no data rows");
    acc.write_row(rows, cfg, episodes.size());
  }
  auto out = open_out(root / "summary.csv");
  out << rows.str();
  return dirs.size();
}

namespace {

bool same_bytes(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  return std::equal(std::istreambuf_iterator<char>(fa), std::istreambuf_iterator<char>(),
                    std::istreambuf_iterator<char>(fb), std::istreambuf_iterator<char>());
}

}  // namespace

ReplayReport replay_check(const fs::path& run_dir) {
  if (!fs::exists(run_dir / "config.json")) throw InputError("no config.json in " + run_dir.string());
  const auto cfg = load_config(run_dir / "config.json");
  const fs::path scratch = fs::temp_directory_path() / ("teleran-replay-" + hex64(sim::derive_seed(
                                                            cfg.seed, fs::absolute(run_dir).string())));
  fs::remove_all(scratch);
  run_campaign(cfg, scratch);
  ReplayReport report;
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(scratch)) {
    if (entry.is_regular_file()) files.push_back(fs::relative(entry.path(), scratch));
  }
  std::sort(files.begin(), files.end());
  for (const auto& rel : files) {
    report.compared.push_back(rel.generic_string());
    if (!same_bytes(scratch / rel, run_dir / rel)) report.differing.push_back(rel.generic_string());
  }
  fs::remove_all(scratch);
  return report;
}

}  // namespace teleran::harness
