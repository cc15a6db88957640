#include "pixellink/presets.hpp"

namespace pixellink {

Resolution parse_resolution(std::string_view s) {
  if (s == "2s") return Resolution::Half;
  if (s == "4s") return Resolution::Quarter;
  throw Error(ErrorCode::InvalidArgument, "resolution must be 2s or 4s, got '" + std::string(s) + "'");
}

PipelineConfig preset(std::string_view name) {
  PipelineConfig cfg;
  auto& d = cfg.decode;
  if (name == "ic15") {
    d.pixel_threshold = 0.8;
    d.link_threshold = 0.8;
    d.min_short_side = 10;
    d.min_area = 300;
  } else if (name == "td500") {
    d.pixel_threshold = 0.8;
    d.link_threshold = 0.7;
    d.min_short_side = 15;
    d.min_area = 600;
  } else if (name == "ic13") {
    d.pixel_threshold = 0.7;
    d.link_threshold = 0.5;
    d.min_short_side = 10;
    d.min_area = 300;
  } else if (name == "ic13-ms") {
    d.pixel_threshold = 0.6;
    d.link_threshold = 0.5;
    d.min_short_side = 10;
    d.min_area = 300;
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown preset '" + std::string(name) + "'");
  }
  d.scale_back = scale_of(cfg.resolution);
  return cfg;
}

std::vector<std::string> preset_names() { return {"ic15", "td500", "ic13", "ic13-ms"}; }

}  // namespace pixellink
