#include "pixellink/augment.hpp"

#include <algorithm>
#include <cmath>

#include "pixellink/geometry.hpp"

namespace pixellink::augment {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

ImageBuffer rotate_image_once(const ImageBuffer& img) {
  ImageBuffer out(img.width, img.height, img.channels);
  for (std::size_t y = 0; y < img.height; ++y) {
    for (std::size_t x = 0; x < img.width; ++x) {
      for (std::size_t c = 0; c < img.channels; ++c) out.at(img.width - 1 - x, y, c) = img.at(y, x, c);
    }
  }
  return out;
}

ImageBuffer resize_image(const ImageBuffer& img, std::size_t out_h, std::size_t out_w) {
  if (img.height == out_h && img.width == out_w) return img;
  ImageBuffer out(out_h, out_w, img.channels);
  // Half-pixel centers, matching the vertex scaling out / in.
  auto source = [](std::size_t i, std::size_t in, std::size_t out_n) {
    const double s = (static_cast<double>(i) + 0.5) * static_cast<double>(in) / static_cast<double>(out_n) - 0.5;
    return std::clamp(s, 0.0, static_cast<double>(in - 1));
  };
  for (std::size_t y = 0; y < out_h; ++y) {
    const double sy = source(y, img.height, out_h);
    const auto y0 = static_cast<std::size_t>(sy);
    const auto y1 = std::min(y0 + 1, img.height - 1);
    const double fy = sy - static_cast<double>(y0);
    for (std::size_t x = 0; x < out_w; ++x) {
      const double sx = source(x, img.width, out_w);
      const auto x0 = static_cast<std::size_t>(sx);
      const auto x1 = std::min(x0 + 1, img.width - 1);
      const double fx = sx - static_cast<double>(x0);
      for (std::size_t c = 0; c < img.channels; ++c) {
        const double top = img.at(y0, x0, c) * (1 - fx) + img.at(y0, x1, c) * fx;
        const double bottom = img.at(y1, x0, c) * (1 - fx) + img.at(y1, x1, c) * fx;
        out.at(y, x, c) = static_cast<std::uint8_t>(std::clamp(std::lround(top * (1 - fy) + bottom * fy), 0L, 255L));
      }
    }
  }
  return out;
}

}  // namespace

void AugmentConfig::validate() const {
  if (!(rotate_prob >= 0 && rotate_prob <= 1)) throw Error(ErrorCode::InvalidArgument, "rotate_prob outside [0, 1]");
  if (!(crop_area_min > 0 && crop_area_min <= crop_area_max && crop_area_max <= 1)) {
    throw Error(ErrorCode::InvalidArgument, "crop area range must satisfy 0 < min <= max <= 1");
  }
  if (!(crop_aspect_min > 0 && crop_aspect_min <= crop_aspect_max)) {
    throw Error(ErrorCode::InvalidArgument, "crop aspect range must satisfy 0 < min <= max");
  }
  if (out_size == 0) throw Error(ErrorCode::InvalidArgument, "out_size must be >= 1");
}

RngStream::RngStream(std::uint64_t seed) : state_(splitmix64(seed)) {
  if (state_ == 0) state_ = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t RngStream::next() {
  state_ ^= state_ >> 12;
  state_ ^= state_ << 25;
  state_ ^= state_ >> 27;
  return state_ * 0x2545F4914F6CDD1DULL;
}

double RngStream::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::uint64_t RngStream::below(std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "below(0)");
  return std::min(n - 1, static_cast<std::uint64_t>(uniform() * static_cast<double>(n)));
}

Sample rotate_quarter(const Sample& in, int k) {
  if (k < 0 || k > 3) throw Error(ErrorCode::InvalidArgument, "quarter turns must be 0..3");
  Sample out = in;
  for (int t = 0; t < k; ++t) {
    const double w = static_cast<double>(out.image.width);
    for (auto& a : out.annots) {
      for (auto& p : a.quad) p = {p.y, w - p.x};
    }
    out.image = rotate_image_once(out.image);
  }
  return out;
}

Sample random_crop(const Sample& in, RngStream& rng, const AugmentConfig& cfg) {
  const std::size_t W = in.image.width, H = in.image.height;
  if (W == 0 || H == 0) throw Error(ErrorCode::InvalidArgument, "empty image");

  std::size_t x0 = 0, y0 = 0, cw = W, ch = H;
  for (int attempt = 0; attempt < cfg.crop_attempts; ++attempt) {
    const double area = rng.uniform(cfg.crop_area_min, cfg.crop_area_max) * static_cast<double>(W * H);
    const double aspect = rng.uniform(cfg.crop_aspect_min, cfg.crop_aspect_max);
    const auto w = static_cast<std::size_t>(std::lround(std::sqrt(area * aspect)));
    const auto h = static_cast<std::size_t>(std::lround(std::sqrt(area / aspect)));
    if (w < 1 || h < 1 || w > W || h > H) continue;
    cw = w;
    ch = h;
    x0 = rng.below(W - w + 1);
    y0 = rng.below(H - h + 1);
    break;
  }

  Sample out;
  out.image = ImageBuffer(ch, cw, in.image.channels);
  for (std::size_t y = 0; y < ch; ++y) {
    const auto* src = &in.image.data[((y0 + y) * W + x0) * in.image.channels];
    std::copy_n(src, cw * in.image.channels, &out.image.data[y * cw * in.image.channels]);
  }

  const double fx0 = static_cast<double>(x0), fy0 = static_cast<double>(y0);
  const std::vector<geom::Point> window = {
      {fx0, fy0}, {fx0 + cw, fy0}, {fx0 + cw, fy0 + ch}, {fx0, fy0 + ch}};
  for (const auto& a : in.annots) {
    const double full = std::abs(geom::signed_area(a.quad));
    const auto visible_ring = geom::clip_convex(a.quad, window);
    const double visible = visible_ring.size() < 3 ? 0.0 : std::abs(geom::signed_area(visible_ring));
    if (full <= 0.0 || visible <= 0.0) continue;
    auto moved = a;
    for (auto& p : moved.quad) p = {p.x - fx0, p.y - fy0};
    moved.remain_fraction = a.remain_fraction * std::min(1.0, visible / full);
    out.annots.push_back(std::move(moved));
  }
  return out;
}

Sample resize_uniform(const Sample& in, std::size_t out_size) {
  if (out_size == 0) throw Error(ErrorCode::InvalidArgument, "out_size must be >= 1");
  Sample out;
  out.image = resize_image(in.image, out_size, out_size);
  const double sx = static_cast<double>(out_size) / static_cast<double>(in.image.width);
  const double sy = static_cast<double>(out_size) / static_cast<double>(in.image.height);
  out.annots = in.annots;
  for (auto& a : out.annots) {
    for (auto& p : a.quad) p = {p.x * sx, p.y * sy};
  }
  return out;
}

std::vector<gt::Annotation> apply_ignore_rules(const std::vector<gt::Annotation>& annots, const AugmentConfig& cfg) {
  auto out = annots;
  for (auto& a : out) {
    const auto box = geom::min_area_rect(a.quad);
    if (box.short_side() < cfg.min_short_side_ignore || a.remain_fraction < cfg.min_remain_fraction) {
      a.ignored = true;
    }
  }
  return out;
}

Sample augment_sample(const Sample& in, RngStream& rng, const AugmentConfig& cfg) {
  cfg.validate();
  Sample s = in;
  if (rng.uniform() < cfg.rotate_prob) s = rotate_quarter(s, static_cast<int>(rng.below(4)));
  s = random_crop(s, rng, cfg);
  s = resize_uniform(s, cfg.out_size);
  s.annots = apply_ignore_rules(s.annots, cfg);
  return s;
}

}  // namespace pixellink::augment
