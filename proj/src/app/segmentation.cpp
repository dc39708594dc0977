#include "teleran/app/segmentation.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace teleran::app {

SegmentationMode mode_from_index(std::size_t index) {
  require(index < kNumModes, "segmentation mode index out of range");
  return kAllModes[index];
}

std::string_view mode_name(SegmentationMode m) {
  switch (m) {
    case SegmentationMode::kRaw:
      return "R";
    case SegmentationMode::kConservative:
      return "SC";
    case SegmentationMode::kAggressive:
      return "SA";
  }
  return "?";
}

SegmentationMode parse_mode(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  if (upper == "R") return SegmentationMode::kRaw;
  if (upper == "SC") return SegmentationMode::kConservative;
  if (upper == "SA") return SegmentationMode::kAggressive;
  throw InputError("unknown segmentation mode `" + std::string(name) + "` (expected R, SC or SA)");
}

SegmentationMode more_aggressive(SegmentationMode m) {
  return m == SegmentationMode::kAggressive ? m : mode_from_index(mode_index(m) + 1);
}

SegmentationMode more_conservative(SegmentationMode m) {
  return m == SegmentationMode::kRaw ? m : mode_from_index(mode_index(m) - 1);
}

void SegmentationProfile::validate(double max_chamfer_distance) const {
  for (std::size_t i = 0; i < kNumModes; ++i) {
    const auto& p = modes[i];
    const std::string name(mode_name(kAllModes[i]));
    if (p.frame_bytes == 0) throw InputError("segmentation: frame_bytes of " + name + " must be positive");
    if (p.chamfer_distance < 0.0 || p.chamfer_distance > max_chamfer_distance) {
      throw InputError("segmentation: chamfer distance of " + name + " must be in [0, cd_max]");
    }
    if (p.encode_delay < SimTime{} || p.decode_delay < SimTime{}) {
      throw InputError("segmentation: processing delays of " + name + " must be non-negative");
    }
    if (i > 0) {
      if (!(p.frame_bytes < modes[i - 1].frame_bytes)) {
        throw InputError("segmentation: frame sizes must strictly decrease R -> SC -> SA");
      }
      if (!(p.chamfer_distance > modes[i - 1].chamfer_distance)) {
        throw InputError("segmentation: chamfer distances must strictly increase R -> SC -> SA");
      }
    }
  }
}

}  // namespace teleran::app
