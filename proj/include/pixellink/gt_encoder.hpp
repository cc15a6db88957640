#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pixellink/geometry.hpp"
#include "pixellink/tensor.hpp"

namespace pixellink::gt {

inline constexpr std::size_t kNumLinks = 8;

/// Neighbor offsets (dx, dy) for link channel k, in row-major scan order.
/// The opposite direction of k is 7 - k.
inline constexpr std::array<std::array<int, 2>, kNumLinks> kNeighborOffsets = {{
    {-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1},
}};

constexpr std::size_t opposite_link(std::size_t k) { return kNumLinks - 1 - k; }

/// One annotated text instance.
struct Annotation {
  std::array<geom::Point, 4> quad{};
  bool dont_care = false;
  bool ignored = false;
  std::string transcription;
  /// Fraction of the original area still visible after cropping.
  double remain_fraction = 1.0;

  /// Excluded from positives and weights: either flag set.
  bool excluded() const { return dont_care || ignored; }
};

/// Parses IC15-style text: "x1,y1,...,x4,y4,transcription" per line.
/// "###" marks do-not-care. A UTF-8 byte-order mark and CRLF are accepted;
/// blank lines are skipped. Throws Error(ParseError) naming the line.
std::vector<Annotation> parse_annotations(std::string_view text);
std::vector<Annotation> load_annotations(const std::filesystem::path& path);

/// Inverse of parse_annotations. Excluded instances are written as "###".
std::string format_annotations(const std::vector<Annotation>& annots);

std::vector<Annotation> scale_annotations(const std::vector<Annotation>& annots, double factor);

/// Supervision targets at prediction-map resolution, all row-major.
struct LabelMaps {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> pixel_label;  // H*W, 1 = text
  std::vector<std::int32_t> instance_id;  // H*W, 0 = background
  std::vector<std::uint8_t> ignore_mask;  // H*W
  std::vector<std::uint8_t> link_label;   // H*W*8

  LabelMaps() = default;
  LabelMaps(std::size_t h, std::size_t w);

  std::size_t index(std::size_t y, std::size_t x) const { return y * width + x; }
  std::uint8_t link(std::size_t y, std::size_t x, std::size_t k) const {
    return link_label[index(y, x) * kNumLinks + k];
  }
  bool positive(std::size_t i) const { return pixel_label[i] != 0 && ignore_mask[i] == 0; }

  Tensor pixel_tensor() const;
  Tensor link_tensor() const;
  Tensor ignore_tensor() const;
  Tensor instance_tensor() const;
};

/// Rasterizes every quad; pixels covered by two or more quads are negative;
/// pixels of excluded quads are flagged in ignore_mask and never positive.
LabelMaps encode_labels(const std::vector<Annotation>& annots, std::size_t height, std::size_t width);

/// Recomputes link labels from pixel_label and instance_id.
void compute_link_labels(LabelMaps& labels);

struct InstanceStats {
  std::size_t count = 0;             // N: instances with at least one positive pixel
  std::vector<double> areas;         // S_i indexed by instance id - 1
  double total_area = 0.0;           // S
  double budget = 0.0;               // B_i = S / N
};

struct InstanceWeights {
  TensorD weights;  // H x W
  InstanceStats stats;
};

/// Instance-balanced pixel weights: each positive pixel of instance i gets
/// (S/N)/S_i, so every instance carries the same total weight.
InstanceWeights instance_weights(const LabelMaps& labels);

}  // namespace pixellink::gt
