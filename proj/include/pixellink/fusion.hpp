#pragma once

#include <utility>
#include <vector>

#include "pixellink/tensor.hpp"

namespace pixellink::fusion {

/// Input sizes for multi-scale testing.
struct ScaleSet {
  std::vector<std::pair<std::size_t, std::size_t>> scales;  // (height, width)
  std::size_t max_longer_side = 0;

  /// (384,384), (512,512), (768,384), (384,768), (768,768), longer side 1600.
  static ScaleSet ic13();

  /// The fixed scales followed by the aspect-preserving size of the image
  /// itself, shrunk so its longer side does not exceed max_longer_side.
  std::vector<std::pair<std::size_t, std::size_t>> input_sizes(std::size_t image_h, std::size_t image_w) const;
};

/// Bilinear resize of the first two axes with corner-aligned sampling:
/// output index i maps to input coordinate i * (in - 1) / (out - 1).
Tensor resize_bilinear(const Tensor& map, std::size_t out_h, std::size_t out_w);

struct PredictionMaps {
  Tensor pixel;  // H x W (optionally x 2)
  Tensor link;   // H x W x 8 (optionally x 2)
};

/// Resizes every map to the largest height and largest width present, then
/// averages element-wise. Pixel and link maps are fused the same way.
PredictionMaps fuse_multiscale(const std::vector<PredictionMaps>& maps);

}  // namespace pixellink::fusion
