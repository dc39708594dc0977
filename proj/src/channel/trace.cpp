#include "teleran/channel/trace.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "teleran/csv.hpp"

namespace teleran::channel {

ChannelTrace::ChannelTrace(const std::vector<TraceSample>& samples, double episode_duration_s) {
  if (samples.empty()) throw InputError("channel trace: no samples");
  for (const auto& s : samples) {
    auto& series = series_[s.vehicle_id];
    if (!series.times.empty() && !(s.time_s > series.times.back())) {
      throw InputError("channel trace: sample times for vehicle " + std::to_string(s.vehicle_id) +
                       " are not strictly increasing at t=" + std::to_string(s.time_s));
    }
    series.times.push_back(s.time_s);
    series.values.push_back(s.pathloss_db);
  }
  for (const auto& [id, series] : series_) {
    if (series.times.front() > 0.0 || series.times.back() < episode_duration_s) {
      throw InputError("channel trace: vehicle " + std::to_string(id) + " does not cover [0, " +
                       std::to_string(episode_duration_s) + "] s");
    }
  }
}

double ChannelTrace::pathloss_at(VehicleId id, double time_s) const {
  const auto it = series_.find(id);
  require(it != series_.end(), "channel trace: unknown vehicle id");
  const auto& t = it->second.times;
  const auto& v = it->second.values;
  if (time_s <= t.front()) return v.front();
  if (time_s >= t.back()) return v.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), time_s) - t.begin());
  const std::size_t lo = hi - 1;
  const double w = (time_s - t[lo]) / (t[hi] - t[lo]);
  return v[lo] + w * (v[hi] - v[lo]);
}

ChannelTrace load_trace(const std::filesystem::path& path, double episode_duration_s) {
  std::ifstream in(path);
  if (!in) throw InputError("channel trace: cannot open " + path.string());
  csv::Reader reader(in, path.string());
  reader.expect_header({"time_s", "vehicle_id", "pathloss_db"});
  std::vector<TraceSample> samples;
  while (auto row = reader.next()) {
    TraceSample s;
    s.time_s = reader.to_double(*row, 0);
    s.vehicle_id = static_cast<VehicleId>(reader.to_uint(*row, 1));
    s.pathloss_db = reader.to_double(*row, 2);
    samples.push_back(s);
  }
  return ChannelTrace(samples, episode_duration_s);
}

}  // namespace teleran::channel
