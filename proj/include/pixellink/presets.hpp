#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pixellink/decoder.hpp"
#include "pixellink/fusion.hpp"
#include "pixellink/loss.hpp"

namespace pixellink {

enum class Resolution { Half = 2, Quarter = 4 };

Resolution parse_resolution(std::string_view s);  // "2s" or "4s"
inline double scale_of(Resolution r) { return static_cast<double>(static_cast<int>(r)); }

/// Settings shared by the command-line subcommands.
struct PipelineConfig {
  Resolution resolution = Resolution::Quarter;
  decode::DecodeConfig decode;
  fusion::ScaleSet scales = fusion::ScaleSet::ic13();
  loss::LossConfig loss;
  std::uint64_t seed = 0;
};

/// Published benchmark settings:
///   ic15    thresholds (0.8, 0.8), short side 10, area 300
///   td500   thresholds (0.8, 0.7), short side 15, area 600
///   ic13    thresholds (0.7, 0.5), short side 10, area 300
///   ic13-ms thresholds (0.6, 0.5), short side 10, area 300
PipelineConfig preset(std::string_view name);
std::vector<std::string> preset_names();

}  // namespace pixellink
