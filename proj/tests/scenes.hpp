#pragma once

// Random synthetic scenes shared by the unit and acceptance tests.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "pixellink/gt_encoder.hpp"

namespace scenes {

using pixellink::geom::Point;
using pixellink::gt::Annotation;

inline std::array<Point, 4> rotated_rect(double cx, double cy, double w, double h, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  std::array<Point, 4> q;
  const double us[4] = {-w / 2, w / 2, w / 2, -w / 2};
  const double vs[4] = {-h / 2, -h / 2, h / 2, h / 2};
  for (int i = 0; i < 4; ++i) q[i] = {cx + us[i] * c - vs[i] * s, cy + us[i] * s + vs[i] * c};
  return q;
}

/// Pixel mask of a quad computed with the brute-force point test.
inline std::vector<std::uint8_t> oracle_mask(const std::array<Point, 4>& quad, std::size_t h, std::size_t w) {
  const std::vector<Point> poly(quad.begin(), quad.end());
  std::vector<std::uint8_t> m(h * w, 0);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      m[y * w + x] = oracle::point_in_polygon(poly, {x + 0.5, y + 0.5}) ? 1 : 0;
    }
  }
  return m;
}

/// True when the set pixels of `mask` form one 8-connected blob.
inline bool eight_connected(const std::vector<std::uint8_t>& mask, std::size_t h, std::size_t w) {
  std::vector<std::uint8_t> all_links(mask.size() * 8, 1);
  const auto labels = oracle::flood_fill_components(h, w, mask, all_links);
  int max_label = 0;
  for (int l : labels) max_label = std::max(max_label, l);
  return max_label == 1;
}

/// 1 to max_count rotated rectangles on an h x w canvas whose pixel masks
/// neither overlap nor touch, each one 8-connected.
inline std::vector<Annotation> random_scene(std::mt19937_64& rng, std::size_t h, std::size_t w,
                                            std::size_t max_count = 8) {
  std::uniform_int_distribution<std::size_t> count_dist(1, max_count);
  std::uniform_real_distribution<double> side(10.0, 60.0), angle(0.0, std::numbers::pi);
  std::uniform_real_distribution<double> ux(0.0, static_cast<double>(w)), uy(0.0, static_cast<double>(h));
  const std::size_t want = count_dist(rng);

  std::vector<Annotation> out;
  std::vector<std::uint8_t> occupied(h * w, 0);
  for (int attempt = 0; attempt < 500 && out.size() < want; ++attempt) {
    const double a = side(rng), b = std::min(side(rng), a);
    const auto quad = rotated_rect(ux(rng), uy(rng), a, b, angle(rng));
    bool inside = true;
    for (const auto& p : quad) inside &= p.x >= 1 && p.y >= 1 && p.x <= w - 1.0 && p.y <= h - 1.0;
    if (!inside) continue;
    const auto mask = oracle_mask(quad, h, w);
    if (!eight_connected(mask, h, w)) continue;
    bool clash = false;
    for (std::size_t i = 0; i < mask.size() && !clash; ++i) clash = mask[i] && occupied[i];
    if (clash) continue;
    // Reserve a one-pixel margin so neighboring instances never touch.
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        if (!mask[y * w + x]) continue;
        for (long dy = -1; dy <= 1; ++dy) {
          for (long dx = -1; dx <= 1; ++dx) {
            const long nx = static_cast<long>(x) + dx, ny = static_cast<long>(y) + dy;
            if (nx >= 0 && ny >= 0 && nx < static_cast<long>(w) && ny < static_cast<long>(h)) {
              occupied[static_cast<std::size_t>(ny) * w + static_cast<std::size_t>(nx)] = 1;
            }
          }
        }
      }
    }
    Annotation ann;
    ann.quad = quad;
    ann.transcription = "text";
    out.push_back(ann);
  }
  return out;
}

}  // namespace scenes
