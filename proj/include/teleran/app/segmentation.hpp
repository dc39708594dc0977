#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "teleran/common.hpp"

namespace teleran::app {

// Point-cloud reduction level, ordered by aggressiveness.
enum class SegmentationMode : std::uint8_t { kRaw = 0, kConservative = 1, kAggressive = 2 };

inline constexpr std::size_t kNumModes = 3;
inline constexpr std::array<SegmentationMode, kNumModes> kAllModes{
    SegmentationMode::kRaw, SegmentationMode::kConservative, SegmentationMode::kAggressive};

constexpr std::size_t mode_index(SegmentationMode m) { return static_cast<std::size_t>(m); }
SegmentationMode mode_from_index(std::size_t index);

std::string_view mode_name(SegmentationMode m);
// Accepts "R", "SC", "SA" (case-insensitive). Throws InputError otherwise.
SegmentationMode parse_mode(std::string_view name);

SegmentationMode more_aggressive(SegmentationMode m);
SegmentationMode more_conservative(SegmentationMode m);

struct ModeProfile {
  std::uint32_t frame_bytes = 0;
  double chamfer_distance = 0.0;
  SimTime encode_delay;
  SimTime decode_delay;
};

struct SegmentationProfile {
  std::array<ModeProfile, kNumModes> modes{{
      {200'000, 0.0, SimTime::from_millis(0), SimTime::from_millis(0)},
      {100'000, 13.5, SimTime::from_millis(3), SimTime::from_millis(0)},
      {18'000, 31.5, SimTime::from_millis(5), SimTime::from_millis(0)},
  }};

  const ModeProfile& operator[](SegmentationMode m) const { return modes[mode_index(m)]; }
  ModeProfile& operator[](SegmentationMode m) { return modes[mode_index(m)]; }

  // Sizes strictly decreasing and CD strictly increasing R -> SC -> SA, with
  // 0 <= CD <= max_chamfer_distance. Throws InputError.
  void validate(double max_chamfer_distance) const;
};

}  // namespace teleran::app
