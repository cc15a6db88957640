#include "pixellink/fusion.hpp"

#include <algorithm>
#include <cmath>

namespace pixellink::fusion {

ScaleSet ScaleSet::ic13() {
  return {{{384, 384}, {512, 512}, {768, 384}, {384, 768}, {768, 768}}, 1600};
}

std::vector<std::pair<std::size_t, std::size_t>> ScaleSet::input_sizes(std::size_t image_h,
                                                                       std::size_t image_w) const {
  if (scales.empty()) throw Error(ErrorCode::InvalidArgument, "empty scale set");
  auto sizes = scales;
  if (max_longer_side > 0 && image_h > 0 && image_w > 0) {
    const double longer = static_cast<double>(std::max(image_h, image_w));
    const double f = std::min(1.0, static_cast<double>(max_longer_side) / longer);
    sizes.emplace_back(std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(image_h * f))),
                       std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(image_w * f))));
  }
  return sizes;
}

Tensor resize_bilinear(const Tensor& map, std::size_t out_h, std::size_t out_w) {
  if (map.ndim() < 2) throw Error(ErrorCode::ShapeMismatch, "resize needs at least 2 axes");
  if (out_h == 0 || out_w == 0) throw Error(ErrorCode::InvalidArgument, "output size must be >= 1");
  const std::size_t in_h = map.dim(0), in_w = map.dim(1);
  if (in_h == out_h && in_w == out_w) return map;

  std::size_t inner = 1;
  for (std::size_t a = 2; a < map.ndim(); ++a) inner *= map.dim(a);
  auto dims = map.dims();
  dims[0] = out_h;
  dims[1] = out_w;
  Tensor out(dims, 0.0f);

  auto source = [](std::size_t i, std::size_t in, std::size_t out_n) {
    return out_n == 1 ? 0.0 : static_cast<double>(i) * static_cast<double>(in - 1) / static_cast<double>(out_n - 1);
  };
  for (std::size_t y = 0; y < out_h; ++y) {
    const double sy = source(y, in_h, out_h);
    const auto y0 = std::min(static_cast<std::size_t>(sy), in_h - 1);
    const auto y1 = std::min(y0 + 1, in_h - 1);
    const double fy = sy - static_cast<double>(y0);
    for (std::size_t x = 0; x < out_w; ++x) {
      const double sx = source(x, in_w, out_w);
      const auto x0 = std::min(static_cast<std::size_t>(sx), in_w - 1);
      const auto x1 = std::min(x0 + 1, in_w - 1);
      const double fx = sx - static_cast<double>(x0);
      for (std::size_t c = 0; c < inner; ++c) {
        auto at = [&](std::size_t yy, std::size_t xx) { return static_cast<double>(map[(yy * in_w + xx) * inner + c]); };
        const double top = at(y0, x0) * (1 - fx) + at(y0, x1) * fx;
        const double bottom = at(y1, x0) * (1 - fx) + at(y1, x1) * fx;
        out[(y * out_w + x) * inner + c] = static_cast<float>(top * (1 - fy) + bottom * fy);
      }
    }
  }
  return out;
}

namespace {

std::vector<std::size_t> trailing_dims(const Tensor& t) { return {t.dims().begin() + 2, t.dims().end()}; }

Tensor average(const std::vector<const Tensor*>& maps, std::size_t h, std::size_t w) {
  std::vector<double> acc;
  std::vector<std::size_t> dims;
  for (const auto* m : maps) {
    const auto r = resize_bilinear(*m, h, w);
    if (acc.empty()) {
      acc.assign(r.size(), 0.0);
      dims = r.dims();
    }
    for (std::size_t i = 0; i < r.size(); ++i) acc[i] += r[i];
  }
  std::vector<float> data(acc.size());
  const double n = static_cast<double>(maps.size());
  for (std::size_t i = 0; i < acc.size(); ++i) data[i] = static_cast<float>(acc[i] / n);
  return Tensor(std::move(dims), std::move(data));
}

}  // namespace

PredictionMaps fuse_multiscale(const std::vector<PredictionMaps>& maps) {
  if (maps.empty()) throw Error(ErrorCode::EmptyInput, "no maps to fuse");
  std::size_t h = 0, w = 0;
  std::vector<const Tensor*> pixels, links;
  for (const auto& m : maps) {
    if (m.pixel.ndim() < 2 || m.link.ndim() < 2) throw Error(ErrorCode::ShapeMismatch, "maps need 2 spatial axes");
    if (m.pixel.dim(0) != m.link.dim(0) || m.pixel.dim(1) != m.link.dim(1)) {
      throw Error(ErrorCode::ShapeMismatch, "pixel and link maps of one scale differ in size");
    }
    if (trailing_dims(m.pixel) != trailing_dims(maps.front().pixel) ||
        trailing_dims(m.link) != trailing_dims(maps.front().link)) {
      throw Error(ErrorCode::ChannelMismatch, "channel layout differs between scales");
    }
    h = std::max(h, m.pixel.dim(0));
    w = std::max(w, m.pixel.dim(1));
    pixels.push_back(&m.pixel);
    links.push_back(&m.link);
  }
  return {average(pixels, h, w), average(links, h, w)};
}

}  // namespace pixellink::fusion
