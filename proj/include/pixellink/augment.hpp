#pragma once

#include <cstdint>
#include <vector>

#include "pixellink/gt_encoder.hpp"
#include "pixellink/tensor.hpp"

namespace pixellink::augment {

struct AugmentConfig {
  double rotate_prob = 0.2;
  double crop_area_min = 0.1;
  double crop_area_max = 1.0;
  double crop_aspect_min = 0.5;
  double crop_aspect_max = 2.0;
  int crop_attempts = 50;
  std::size_t out_size = 512;
  double min_short_side_ignore = 10.0;
  double min_remain_fraction = 0.2;

  void validate() const;
};

/// Seedable generator with a fixed, portable algorithm: the seed is mixed
/// once through splitmix64, then each draw is one xorshift64* step.
/// Real draws take the top 53 bits: u = (next() >> 11) * 2^-53.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform in [0, 1).
  double uniform();
  /// Uniform in [lo, hi); returns lo when lo == hi.
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n), n >= 1.
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t state_;
};

struct Sample {
  ImageBuffer image;
  std::vector<gt::Annotation> annots;
};

/// Rotates by k quarter turns counter-clockwise (as displayed). For one
/// turn, pixel (x, y) moves to (y, W - 1 - x) and vertex (x, y) to (y, W - x).
Sample rotate_quarter(const Sample& in, int k);

/// Crops a window of random area fraction and aspect ratio (w / h).
/// Instances with no visible area are removed; the others keep their full
/// quads translated into the window and have remain_fraction multiplied by
/// their visible share.
Sample random_crop(const Sample& in, RngStream& rng, const AugmentConfig& cfg);

/// Bilinear resize to out_size x out_size; vertices scale by (out/W, out/H).
Sample resize_uniform(const Sample& in, std::size_t out_size);

/// Flags instances whose min-area rectangle has a short side below the
/// limit, or whose remain_fraction is below the limit. Never un-flags.
std::vector<gt::Annotation> apply_ignore_rules(const std::vector<gt::Annotation>& annots, const AugmentConfig& cfg);

/// Rotation (with probability rotate_prob, k uniform over 0..3), crop,
/// resize, then the ignore rules.
Sample augment_sample(const Sample& in, RngStream& rng, const AugmentConfig& cfg);

}  // namespace pixellink::augment
