#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pixellink/geometry.hpp"
#include "pixellink/tensor.hpp"

namespace pixellink::decode {

struct DecodeConfig {
  double pixel_threshold = 0.8;
  double link_threshold = 0.8;
  double min_short_side = 10.0;
  double min_area = 300.0;
  double scale_back = 4.0;  // 2 for 2s maps, 4 for 4s maps

  void validate() const;
};

/// Binary maps stored as bytes: pixel H*W, link H*W*8.
struct BinaryMaps {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> pixel;
  std::vector<std::uint8_t> link;
};

struct ComponentMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::int32_t> labels;  // 0 = background, else 1..count
  std::size_t count = 0;
};

struct DetectionSet {
  std::vector<geom::OrientedBox> boxes;
  std::size_t dropped = 0;
};

/// Union-find with union by size and path compression.
class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n);
  std::size_t find(std::size_t x);
  bool unite(std::size_t a, std::size_t b);
  std::size_t size_of(std::size_t x) { return size_[find(x)]; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

/// Value >= threshold becomes 1. Throws OutOfRangeProbability for values
/// outside [0, 1] (or NaN) and ShapeMismatch for inconsistent shapes.
BinaryMaps threshold_maps(const Tensor& pixel_prob, const Tensor& link_prob, const DecodeConfig& cfg);

/// Two neighboring positive pixels join when either directed link between
/// them is positive. Ids follow first-encounter row-major order.
ComponentMap link_components(const BinaryMaps& maps);

/// One min-area rectangle per component over the corner points of its
/// pixels, scaled by cfg.scale_back.
std::vector<geom::OrientedBox> extract_boxes(const ComponentMap& components, const DecodeConfig& cfg);

/// Drops boxes with short side < min_short_side or area < min_area.
DetectionSet post_filter(const std::vector<geom::OrientedBox>& boxes, const DecodeConfig& cfg);

DetectionSet decode(const Tensor& pixel_prob, const Tensor& link_prob, const DecodeConfig& cfg);

/// Lower-interpolated (1 - keep_fraction) quantile: sorted[floor(q * (n-1))].
double percentile_threshold(std::span<const double> values, double keep_fraction);

}  // namespace pixellink::decode
