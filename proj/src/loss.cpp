#include "pixellink/loss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pixellink::loss {

namespace {

using gt::kNeighborOffsets;
using gt::kNumLinks;

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

void expect_dims(const TensorD& t, std::vector<std::size_t> dims, const char* what) {
  if (t.dims() != dims) throw Error(ErrorCode::ShapeMismatch, std::string(what) + " has unexpected shape");
}

void check_shapes(const TensorD& pixel_logits, const gt::LabelMaps& labels, const TensorD& weights) {
  expect_dims(pixel_logits, {labels.height, labels.width, 2}, "pixel logits");
  expect_dims(weights, {labels.height, labels.width}, "weight map");
}

std::size_t count_positive(const gt::LabelMaps& labels) {
  std::size_t s = 0;
  for (std::size_t i = 0; i < labels.pixel_label.size(); ++i) s += labels.positive(i) ? 1 : 0;
  return s;
}

bool link_in_bounds(const gt::LabelMaps& labels, std::size_t y, std::size_t x, std::size_t k) {
  const long nx = static_cast<long>(x) + kNeighborOffsets[k][0];
  const long ny = static_cast<long>(y) + kNeighborOffsets[k][1];
  return nx >= 0 && ny >= 0 && nx < static_cast<long>(labels.width) && ny < static_cast<long>(labels.height);
}

double pixel_normalizer(const gt::LabelMaps& labels, const LossConfig& cfg) {
  return (1.0 + cfg.neg_ratio) * static_cast<double>(count_positive(labels));
}

// Sums of W over positive and negative links.
std::pair<double, double> link_weight_sums(const gt::LabelMaps& labels, const TensorD& weights) {
  double pos = 0.0, neg = 0.0;
  for (std::size_t y = 0; y < labels.height; ++y) {
    for (std::size_t x = 0; x < labels.width; ++x) {
      const auto i = labels.index(y, x);
      if (!labels.positive(i)) continue;
      for (std::size_t k = 0; k < kNumLinks; ++k) {
        if (!link_in_bounds(labels, y, x, k)) continue;
        (labels.link(y, x, k) ? pos : neg) += weights[i];
      }
    }
  }
  return {pos, neg};
}

double weighted_pixel_term(const TensorD& pixel_logits, const gt::LabelMaps& labels, const TensorD& weights,
                           const LossConfig& cfg) {
  const double norm = pixel_normalizer(labels, cfg);
  if (norm <= 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] == 0.0) continue;
    sum += weights[i] * pair_cross_entropy(pixel_logits[2 * i], pixel_logits[2 * i + 1], labels.positive(i));
  }
  return sum / norm;
}

}  // namespace

TensorD softmax_pair(const TensorD& logits) {
  if (logits.dims().back() != 2) throw Error(ErrorCode::ShapeMismatch, "softmax expects a trailing axis of 2");
  TensorD out = logits;
  for (std::size_t i = 0; i < logits.size(); i += 2) {
    const double a = logits[i], b = logits[i + 1];
    if (!std::isfinite(a) || !std::isfinite(b)) throw Error(ErrorCode::NonFinite, "logit at " + std::to_string(i));
    const double m = std::max(a, b);
    const double ea = std::exp(a - m), eb = std::exp(b - m);
    out[i] = ea / (ea + eb);
    out[i + 1] = eb / (ea + eb);
  }
  return out;
}

double pair_cross_entropy(double z_neg, double z_pos, bool label) {
  if (!std::isfinite(z_neg) || !std::isfinite(z_pos)) throw Error(ErrorCode::NonFinite, "logit");
  return label ? softplus(z_neg - z_pos) : softplus(z_pos - z_neg);
}

PixelLoss pixel_loss(const TensorD& pixel_logits, const gt::LabelMaps& labels, const TensorD& inst_weights,
                     const LossConfig& cfg) {
  check_shapes(pixel_logits, labels, inst_weights);
  const std::size_t n = labels.height * labels.width;
  PixelLoss out{0.0, TensorD({labels.height, labels.width}, 0.0), 0, 0};

  std::vector<double> ce(n);
  std::vector<std::size_t> negatives;
  for (std::size_t i = 0; i < n; ++i) {
    ce[i] = pair_cross_entropy(pixel_logits[2 * i], pixel_logits[2 * i + 1], labels.positive(i));
    if (labels.positive(i)) {
      ++out.num_positive;
      out.weights[i] = inst_weights[i];
    } else if (labels.ignore_mask[i] == 0) {
      negatives.push_back(i);
    }
  }
  if (out.num_positive == 0) {
    std::fill(out.weights.storage().begin(), out.weights.storage().end(), 0.0);
    return out;
  }

  const auto quota = static_cast<std::size_t>(std::floor(cfg.neg_ratio * static_cast<double>(out.num_positive)));
  out.num_selected = std::min(quota, negatives.size());
  auto harder = [&](std::size_t a, std::size_t b) { return ce[a] > ce[b] || (ce[a] == ce[b] && a < b); };
  std::partial_sort(negatives.begin(), negatives.begin() + static_cast<std::ptrdiff_t>(out.num_selected),
                    negatives.end(), harder);
  for (std::size_t j = 0; j < out.num_selected; ++j) out.weights[negatives[j]] = 1.0;

  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += out.weights[i] * ce[i];
  out.value = sum / pixel_normalizer(labels, cfg);
  return out;
}

LinkLoss link_loss(const TensorD& link_logits, const gt::LabelMaps& labels, const TensorD& weights) {
  expect_dims(link_logits, {labels.height, labels.width, kNumLinks, 2}, "link logits");
  expect_dims(weights, {labels.height, labels.width}, "weight map");

  double pos = 0.0, neg = 0.0;
  for (std::size_t y = 0; y < labels.height; ++y) {
    for (std::size_t x = 0; x < labels.width; ++x) {
      const auto i = labels.index(y, x);
      if (!labels.positive(i) || weights[i] == 0.0) continue;
      for (std::size_t k = 0; k < kNumLinks; ++k) {
        if (!link_in_bounds(labels, y, x, k)) continue;
        const bool linked = labels.link(y, x, k) != 0;
        const double ce = pair_cross_entropy(link_logits(y, x, k, 0), link_logits(y, x, k, 1), linked);
        (linked ? pos : neg) += weights[i] * ce;
      }
    }
  }
  const auto [wpos, wneg] = link_weight_sums(labels, weights);
  return {wpos > 0 ? pos / wpos : 0.0, wneg > 0 ? neg / wneg : 0.0};
}

LossBreakdown total_loss(const TensorD& pixel_logits, const TensorD& link_logits, const gt::LabelMaps& labels,
                         const TensorD& inst_weights, const LossConfig& cfg) {
  auto px = pixel_loss(pixel_logits, labels, inst_weights, cfg);
  const auto lk = link_loss(link_logits, labels, px.weights);
  LossBreakdown out;
  out.pixel = px.value;
  out.link_pos = lk.pos;
  out.link_neg = lk.neg;
  out.total = cfg.lambda * px.value + lk.pos + lk.neg;
  out.weights = std::move(px.weights);
  return out;
}

double weighted_total_loss(const TensorD& pixel_logits, const TensorD& link_logits, const gt::LabelMaps& labels,
                           const TensorD& weights, const LossConfig& cfg) {
  check_shapes(pixel_logits, labels, weights);
  const auto lk = link_loss(link_logits, labels, weights);
  return cfg.lambda * weighted_pixel_term(pixel_logits, labels, weights, cfg) + lk.pos + lk.neg;
}

LossGradient weighted_loss_gradient(const TensorD& pixel_logits, const TensorD& link_logits,
                                    const gt::LabelMaps& labels, const TensorD& weights, const LossConfig& cfg) {
  check_shapes(pixel_logits, labels, weights);
  expect_dims(link_logits, {labels.height, labels.width, kNumLinks, 2}, "link logits");
  LossGradient g{TensorD(pixel_logits.dims(), 0.0), TensorD(link_logits.dims(), 0.0)};

  // d CE / d z = softmax(z) - onehot(label), scaled by weight / normalizer.
  const auto p_pix = softmax_pair(pixel_logits);
  const double norm = pixel_normalizer(labels, cfg);
  if (norm > 0) {
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] == 0.0) continue;
      const double s = cfg.lambda * weights[i] / norm;
      const double target = labels.positive(i) ? 1.0 : 0.0;
      g.pixel[2 * i] = s * (p_pix[2 * i] - (1.0 - target));
      g.pixel[2 * i + 1] = s * (p_pix[2 * i + 1] - target);
    }
  }

  const auto [wpos, wneg] = link_weight_sums(labels, weights);
  const auto p_link = softmax_pair(link_logits);
  for (std::size_t y = 0; y < labels.height; ++y) {
    for (std::size_t x = 0; x < labels.width; ++x) {
      const auto i = labels.index(y, x);
      if (!labels.positive(i) || weights[i] == 0.0) continue;
      for (std::size_t k = 0; k < kNumLinks; ++k) {
        if (!link_in_bounds(labels, y, x, k)) continue;
        const bool linked = labels.link(y, x, k) != 0;
        const double s = weights[i] / (linked ? wpos : wneg);
        const double target = linked ? 1.0 : 0.0;
        g.link(y, x, k, 0) = s * (p_link(y, x, k, 0) - (1.0 - target));
        g.link(y, x, k, 1) = s * (p_link(y, x, k, 1) - target);
      }
    }
  }
  return g;
}

LossGradient loss_gradient(const TensorD& pixel_logits, const TensorD& link_logits, const gt::LabelMaps& labels,
                           const TensorD& inst_weights, const LossConfig& cfg) {
  const auto px = pixel_loss(pixel_logits, labels, inst_weights, cfg);
  return weighted_loss_gradient(pixel_logits, link_logits, labels, px.weights, cfg);
}

}  // namespace pixellink::loss
