#include "pixellink/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pixellink/gt_encoder.hpp"

namespace pixellink::decode {

namespace {

using gt::kNeighborOffsets;
using gt::kNumLinks;

void check_probability(float v, const char* what, std::size_t i) {
  if (!(v >= 0.0f && v <= 1.0f)) {
    throw Error(ErrorCode::OutOfRangeProbability,
                std::string(what) + " value " + std::to_string(v) + " at index " + std::to_string(i));
  }
}

// Accepts a plain probability map or a softmax output with a trailing class
// axis of 2, in which case the positive channel is used.
float prob_at(const Tensor& t, std::size_t base_ndim, std::size_t i) {
  return t.ndim() == base_ndim ? t[i] : t[2 * i + 1];
}

}  // namespace

void DecodeConfig::validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(pixel_threshold) || !in_unit(link_threshold)) {
    throw Error(ErrorCode::InvalidArgument, "thresholds must lie in [0, 1]");
  }
  if (!(min_short_side >= 0) || !(min_area >= 0)) {
    throw Error(ErrorCode::InvalidArgument, "post-filter thresholds must be >= 0");
  }
  if (!(scale_back >= 1)) throw Error(ErrorCode::InvalidArgument, "scale_back must be >= 1");
}

DisjointSet::DisjointSet(std::size_t n) : parent_(n), size_(n, 1) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSet::find(std::size_t x) {
  std::size_t root = x;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[x] != root) x = std::exchange(parent_[x], root);
  return root;
}

bool DisjointSet::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  return true;
}

BinaryMaps threshold_maps(const Tensor& pixel_prob, const Tensor& link_prob, const DecodeConfig& cfg) {
  const bool pixel_ok = pixel_prob.ndim() == 2 || (pixel_prob.ndim() == 3 && pixel_prob.dim(2) == 2);
  const bool link_ok = link_prob.ndim() >= 3 && link_prob.dim(2) == kNumLinks &&
                       (link_prob.ndim() == 3 || (link_prob.ndim() == 4 && link_prob.dim(3) == 2));
  if (!pixel_ok || !link_ok) throw Error(ErrorCode::ShapeMismatch, "expected pixel H x W and link H x W x 8");
  if (pixel_prob.dim(0) != link_prob.dim(0) || pixel_prob.dim(1) != link_prob.dim(1)) {
    throw Error(ErrorCode::ShapeMismatch, "pixel and link maps differ in size");
  }

  BinaryMaps out;
  out.height = pixel_prob.dim(0);
  out.width = pixel_prob.dim(1);
  out.pixel.resize(out.height * out.width);
  out.link.resize(out.pixel.size() * kNumLinks);
  for (std::size_t i = 0; i < out.pixel.size(); ++i) {
    const float v = prob_at(pixel_prob, 2, i);
    check_probability(v, "pixel", i);
    out.pixel[i] = v >= cfg.pixel_threshold ? 1 : 0;
  }
  for (std::size_t i = 0; i < out.link.size(); ++i) {
    const float v = prob_at(link_prob, 3, i);
    check_probability(v, "link", i);
    out.link[i] = v >= cfg.link_threshold ? 1 : 0;
  }
  return out;
}

ComponentMap link_components(const BinaryMaps& maps) {
  const std::size_t h = maps.height, w = maps.width;
  if (maps.pixel.size() != h * w || maps.link.size() != h * w * kNumLinks) {
    throw Error(ErrorCode::ShapeMismatch, "binary maps inconsistent with their dims");
  }
  DisjointSet sets(h * w);
  // Each undirected pair is visited once, from the earlier pixel in scan
  // order through the forward directions k = 4..7.
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t i = y * w + x;
      if (!maps.pixel[i]) continue;
      for (std::size_t k = 4; k < kNumLinks; ++k) {
        const long nx = static_cast<long>(x) + kNeighborOffsets[k][0];
        const long ny = static_cast<long>(y) + kNeighborOffsets[k][1];
        if (nx < 0 || nx >= static_cast<long>(w) || ny >= static_cast<long>(h)) continue;
        const std::size_t j = static_cast<std::size_t>(ny) * w + static_cast<std::size_t>(nx);
        if (!maps.pixel[j]) continue;
        if (maps.link[i * kNumLinks + k] || maps.link[j * kNumLinks + gt::opposite_link(k)]) sets.unite(i, j);
      }
    }
  }

  ComponentMap out{h, w, std::vector<std::int32_t>(h * w, 0), 0};
  std::vector<std::int32_t> root_label(h * w, 0);
  for (std::size_t i = 0; i < h * w; ++i) {
    if (!maps.pixel[i]) continue;
    auto& id = root_label[sets.find(i)];
    if (id == 0) id = static_cast<std::int32_t>(++out.count);
    out.labels[i] = id;
  }
  return out;
}

std::vector<geom::OrientedBox> extract_boxes(const ComponentMap& components, const DecodeConfig& cfg) {
  std::vector<std::vector<geom::Point>> corners(components.count);
  for (std::size_t y = 0; y < components.height; ++y) {
    for (std::size_t x = 0; x < components.width; ++x) {
      const auto id = components.labels[y * components.width + x];
      if (id == 0) continue;
      auto& pts = corners[static_cast<std::size_t>(id - 1)];
      const double fx = static_cast<double>(x), fy = static_cast<double>(y);
      pts.insert(pts.end(), {{fx, fy}, {fx + 1, fy}, {fx, fy + 1}, {fx + 1, fy + 1}});
    }
  }
  std::vector<geom::OrientedBox> boxes;
  boxes.reserve(corners.size());
  for (const auto& pts : corners) boxes.push_back(geom::min_area_rect(pts).scaled(cfg.scale_back));
  return boxes;
}

DetectionSet post_filter(const std::vector<geom::OrientedBox>& boxes, const DecodeConfig& cfg) {
  DetectionSet out;
  for (const auto& b : boxes) {
    if (b.short_side() < cfg.min_short_side || b.area() < cfg.min_area) {
      ++out.dropped;
    } else {
      out.boxes.push_back(b);
    }
  }
  return out;
}

DetectionSet decode(const Tensor& pixel_prob, const Tensor& link_prob, const DecodeConfig& cfg) {
  cfg.validate();
  const auto binary = threshold_maps(pixel_prob, link_prob, cfg);
  return post_filter(extract_boxes(link_components(binary), cfg), cfg);
}

double percentile_threshold(std::span<const double> values, double keep_fraction) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "percentile of no values");
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "keep_fraction must lie in (0, 1]");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double q = 1.0 - keep_fraction;
  const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(sorted.size() - 1) + 1e-9));
  return sorted[std::min(idx, sorted.size() - 1)];
}

}  // namespace pixellink::decode
