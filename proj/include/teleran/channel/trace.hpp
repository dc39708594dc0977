#pragma once

#include <filesystem>
#include <map>
#include <vector>

#include "teleran/common.hpp"

namespace teleran::channel {

struct TraceSample {
  double time_s = 0.0;
  VehicleId vehicle_id = 0;
  double pathloss_db = 0.0;
};

// Pathloss samples per vehicle, validated for monotone time and coverage.
class ChannelTrace {
 public:
  ChannelTrace() = default;
  // Validates and indexes the samples. Throws InputError on non-monotone
  // times, empty input or missing coverage of [0, episode_duration_s].
  ChannelTrace(const std::vector<TraceSample>& samples, double episode_duration_s);

  bool has_vehicle(VehicleId id) const { return series_.count(id) != 0; }
  std::size_t vehicle_count() const { return series_.size(); }
  // Linear interpolation in time; clamps outside the sampled range.
  double pathloss_at(VehicleId id, double time_s) const;

 private:
  struct Series {
    std::vector<double> times;
    std::vector<double> values;
  };
  std::map<VehicleId, Series> series_;
};

// Reads the `time_s,vehicle_id,pathloss_db` CSV format.
ChannelTrace load_trace(const std::filesystem::path& path, double episode_duration_s);

}  // namespace teleran::channel
