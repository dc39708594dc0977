// Command-line front end: run, summarize, replay-check.
#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "teleran/csv.hpp"
#include "teleran/harness/campaign.hpp"

namespace fs = std::filesystem;
using namespace teleran;
using namespace teleran::harness;

namespace {

std::vector<std::string> list_arg(const std::string& s) {
  std::vector<std::string> out;
  for (auto& part : csv::split(s)) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

std::string run_label(const ExperimentConfig& c) {
  std::ostringstream os;
  os << policy_name(c.policy) << "_nu" << c.num_vehicles << "_p" << csv::format_double(c.radio.tx_power_dbm) << "_"
     << metrics::state_config_name(c.state_config);
  return os.str();
}

struct RunArgs {
  std::string config;
  std::string policy;
  std::string num_vehicles;
  std::string tx_power;
  std::string state_config;
  std::string seed;
  std::string out = "runs/latest";
  std::string profile;
  std::string preset = "default";
  std::vector<std::string> overrides;
  std::size_t workers = 0;
};

int do_run(const RunArgs& a) {
  ExperimentConfig base = a.config.empty() ? preset(a.preset) : load_config(a.config);
  if (!a.profile.empty()) base.profile = parse_profile(a.profile);
  if (!a.seed.empty()) base.seed = std::stoull(a.seed);
  if (a.workers > 0) base.workers = a.workers;
  for (const auto& o : a.overrides) apply_override(base, o);

  auto or_default = [](const std::string& s, std::string def) { return s.empty() ? std::vector<std::string>{def} : list_arg(s); };
  const auto policies = or_default(a.policy, std::string(policy_name(base.policy)));
  const auto vehicles = or_default(a.num_vehicles, std::to_string(base.num_vehicles));
  const auto powers = or_default(a.tx_power, csv::format_double(base.radio.tx_power_dbm));
  const auto states = or_default(a.state_config, std::string(metrics::state_config_name(base.state_config)));

  std::vector<ExperimentConfig> grid;
  for (const auto& p : policies) {
    for (const auto& n : vehicles) {
      for (const auto& pw : powers) {
        for (const auto& s : states) {
          ExperimentConfig c = base;
          c.policy = parse_policy(p);
          c.num_vehicles = std::stoul(n);
          c.radio.tx_power_dbm = std::stod(pw);
          c.state_config = metrics::parse_state_config(s);
          c.validate();
          grid.push_back(c);
        }
      }
    }
  }
  const fs::path out(a.out);
  for (const auto& c : grid) {
    const fs::path dir = grid.size() == 1 ? out : out / run_label(c);
    std::clog << "run " << run_label(c) << " -> " << dir.string() << " (train " << c.train_episodes() << ", test "
              << c.test_episodes() << ")\n";
    run_campaign(c, dir, &std::clog);
  }
  if (grid.size() > 1) summarize(out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Teleoperated-driving cell simulator with a RAN-AI segmentation controller"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run = app.add_subcommand("run", "train and test one configuration or a sweep");
  run->add_option("--config", ra.config, "JSON config file")->check(CLI::ExistingFile);
  run->add_option("--preset", ra.preset, "built-in config when --config is absent (default, smoke)");
  run->add_option("--policy", ra.policy, "C-R, C-SC, C-SA, D-S, DQL, PPO; comma list sweeps");
  run->add_option("--num-vehicles", ra.num_vehicles, "vehicles in the cell; comma list sweeps");
  run->add_option("--tx-power-dbm", ra.tx_power, "uplink transmit power; comma list sweeps");
  run->add_option("--state-config", ra.state_config, "APP, PHY, FULL, APP_NET, PHY_NET; comma list sweeps");
  run->add_option("--seed", ra.seed, "master seed");
  run->add_option("--out", ra.out, "output directory");
  run->add_option("--profile", ra.profile, "full or smoke")->check(CLI::IsMember({"full", "smoke"}));
  run->add_option("--set", ra.overrides, "override a config key, e.g. --set radio.noise_figure_db=7");
  run->add_option("--workers", ra.workers, "parallel test-episode workers");

  std::string summarize_in;
  auto* sum = app.add_subcommand("summarize", "recompute summary.csv from the run directories below a path");
  sum->add_option("--in", summarize_in, "directory")->required()->check(CLI::ExistingDirectory);

  std::string replay_in;
  auto* replay = app.add_subcommand("replay-check", "re-run recorded configurations and diff every output file");
  replay->add_option("--in", replay_in, "directory")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return do_run(ra);
    if (*sum) {
      const auto rows = summarize(summarize_in);
      std::cout << "wrote " << (fs::path(summarize_in) / "summary.csv").string() << " (" << rows << " rows)\n";
      return 0;
    }
    if (*replay) {
      int status = 0;
      for (const auto& dir : find_run_dirs(replay_in)) {
        const auto report = replay_check(dir);
        std::cout << dir.string() << ": " << report.compared.size() << " files, "
                  << (report.identical() ? "identical" : "DIFFERENT") << '\n';
        for (const auto& f : report.differing) std::cout << "  differs: " << f << '\n';
        if (!report.identical()) status = 1;
      }
      return status;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ContractViolation& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  } catch (const nn::TrainingDiverged& e) {
    std::cerr << "training diverged: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
