#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "teleran/harness/campaign.hpp"
#include "teleran/ran/mcs_table.hpp"

namespace py = pybind11;
using namespace teleran;

namespace {

harness::ExperimentConfig config_from_text(const std::string& text) {
  return harness::config_from_json(nlohmann::json::parse(text));
}

py::dict episode_dict(const harness::EpisodeResult& r) {
  py::list vehicles;
  for (const auto& v : r.vehicles) {
    py::dict d;
    d["vehicle_id"] = v.vehicle_id;
    d["windows"] = v.windows;
    d["mean_reward"] = v.mean_reward();
    d["mean_qos"] = v.mean_qos();
    d["mean_qoe"] = v.mean_qoe();
    d["mode_counts"] = std::vector<std::uint64_t>(v.mode_counts.begin(), v.mode_counts.end());
    d["window_delays_s"] = v.window_delays_s;
    d["window_prp"] = v.window_prp;
    vehicles.append(d);
  }
  py::list bytes;
  for (const auto& b : r.bytes) {
    py::dict d;
    d["generated"] = b.generated;
    d["enqueued"] = b.enqueued;
    d["served"] = b.served;
    d["dropped"] = b.dropped;
    d["queued_at_end"] = b.queued_at_end;
    d["received"] = b.received;
    d["conserved"] = b.conserved();
    bytes.append(d);
  }
  py::dict out;
  out["episode_index"] = r.episode_index;
  out["episode_seed"] = r.episode_seed;
  out["mean_reward"] = r.mean_reward();
  out["mean_qos"] = r.mean_qos();
  out["mean_qoe"] = r.mean_qoe();
  out["vehicles"] = vehicles;
  out["bytes"] = bytes;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Teleoperated-driving cell simulator core";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_RuntimeError);

  m.def("preset_config", [](const std::string& name) { return harness::to_json(harness::preset(name)).dump(); },
        py::arg("name") = "default", "Resolved JSON text of a built-in preset.");
  m.def("resolve_config", [](const std::string& text) { return harness::to_json(config_from_text(text)).dump(); },
        py::arg("config_json"), "Fills defaults and validates a JSON config.");

  m.def(
      "run_episode",
      [](const std::string& text, std::uint64_t episode_seed) {
        const auto cfg = config_from_text(text);
        auto policy = harness::make_policy(cfg, sim::derive_seed(cfg.seed, "agent"));
        harness::EpisodeResult r;
        {
          py::gil_scoped_release release;
          r = harness::run_episode(cfg, *policy, false, 0, episode_seed, harness::load_resources(cfg));
        }
        return episode_dict(r);
      },
      py::arg("config_json"), py::arg("episode_seed"), "One test-mode episode with a freshly built policy.");

  m.def(
      "run_campaign",
      [](const std::string& text, const std::filesystem::path& out) {
        const auto cfg = config_from_text(text);
        harness::CampaignOutputs o;
        {
          py::gil_scoped_release release;
          o = harness::run_campaign(cfg, out);
        }
        py::dict d;
        d["dir"] = o.dir;
        d["train_episodes"] = o.train_episodes;
        d["test_episodes"] = o.test_episodes;
        d["mean_reward"] = o.test_mean_reward;
        d["mean_qos"] = o.test_mean_qos;
        d["mean_qoe"] = o.test_mean_qoe;
        return d;
      },
      py::arg("config_json"), py::arg("out_dir"));

  m.def("summarize", &harness::summarize, py::arg("root"));
  m.def(
      "replay_check",
      [](const std::filesystem::path& dir) {
        const auto r = harness::replay_check(dir);
        py::dict d;
        d["compared"] = r.compared;
        d["differing"] = r.differing;
        d["identical"] = r.identical();
        return d;
      },
      py::arg("run_dir"));

  m.def("prp", &metrics::prp, py::arg("n_rx"), py::arg("n_tx"));
  m.def(
      "qos",
      [](double delay_s, double prp, double delay_max_s, double prp_min) {
        metrics::KpiThresholds t;
        t.delay_max_s = delay_max_s;
        t.prp_min = prp_min;
        return metrics::qos(delay_s, prp, t);
      },
      py::arg("delay_s"), py::arg("prp"), py::arg("delay_max_s") = 0.05, py::arg("prp_min") = 1.0);
  m.def(
      "qoe",
      [](double cd, double cd_max) {
        metrics::KpiThresholds t;
        t.cd_max = cd_max;
        return metrics::qoe(cd, t);
      },
      py::arg("cd"), py::arg("cd_max") = 45.0);
  m.def(
      "reward",
      [](double delay_s, int qos, double qoe, double alpha, double delay_max_s) {
        metrics::KpiThresholds t;
        t.alpha = alpha;
        t.delay_max_s = delay_max_s;
        return metrics::reward(delay_s, qos, qoe, t);
      },
      py::arg("delay_s"), py::arg("qos"), py::arg("qoe"), py::arg("alpha") = 1.0, py::arg("delay_max_s") = 0.05);
  m.def("chamfer_distance", &metrics::chamfer_distance, py::arg("a"), py::arg("b"));
  m.def(
      "mcs_for_snr",
      [](double snr_db) {
        const auto sel = ran::McsTable::capped_shannon().select(snr_db);
        return py::make_tuple(sel.index, sel.efficiency, sel.outage);
      },
      py::arg("snr_db"), "(index, efficiency, outage) under the default table.");
  m.def("quantile", &harness::quantile, py::arg("samples"), py::arg("q"));
}
