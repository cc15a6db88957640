#pragma once

#include "pixellink/gt_encoder.hpp"
#include "pixellink/tensor.hpp"

namespace pixellink::loss {

// Class axis convention for every logit tensor: channel 0 = negative
// (non-text / not linked), channel 1 = positive.

struct LossConfig {
  double lambda = 2.0;     // weight of the pixel term
  double neg_ratio = 3.0;  // r: OHEM negatives per positive pixel
};

struct PixelLoss {
  double value = 0.0;
  TensorD weights;  // W: instance weights on positives, 1 on mined negatives
  std::size_t num_positive = 0;
  std::size_t num_selected = 0;
};

struct LinkLoss {
  double pos = 0.0;
  double neg = 0.0;
};

struct LossBreakdown {
  double total = 0.0;
  double pixel = 0.0;
  double link_pos = 0.0;
  double link_neg = 0.0;
  TensorD weights;
};

struct LossGradient {
  TensorD pixel;  // H x W x 2
  TensorD link;   // H x W x 8 x 2
};

/// Softmax over a trailing axis of extent 2, max-subtracted.
TensorD softmax_pair(const TensorD& logits);

/// Per-element cross-entropy -log softmax(z)[label] for a pair of logits.
double pair_cross_entropy(double z_neg, double z_pos, bool label);

/// Instance-balanced cross-entropy with online hard negative mining.
///
/// The min(floor(r*S), available) non-ignored negatives with the highest
/// cross-entropy get weight 1 (ties broken by row-major index). The loss is
/// sum(W * CE) / ((1 + r) * S); zero when S = 0.
PixelLoss pixel_loss(const TensorD& pixel_logits, const gt::LabelMaps& labels, const TensorD& inst_weights,
                     const LossConfig& cfg);

/// Class-balanced link loss on positive pixels, each link weighted by W of
/// its source pixel. Out-of-bounds directions carry no weight.
LinkLoss link_loss(const TensorD& link_logits, const gt::LabelMaps& labels, const TensorD& weights);

LossBreakdown total_loss(const TensorD& pixel_logits, const TensorD& link_logits, const gt::LabelMaps& labels,
                         const TensorD& inst_weights, const LossConfig& cfg);

/// Total loss for a fixed pixel weight matrix (no mining).
double weighted_total_loss(const TensorD& pixel_logits, const TensorD& link_logits, const gt::LabelMaps& labels,
                           const TensorD& weights, const LossConfig& cfg);

/// Analytic d(total)/d(logits) for a fixed weight matrix.
LossGradient weighted_loss_gradient(const TensorD& pixel_logits, const TensorD& link_logits,
                                    const gt::LabelMaps& labels, const TensorD& weights, const LossConfig& cfg);

/// Mines negatives once, then differentiates with the selection held fixed.
LossGradient loss_gradient(const TensorD& pixel_logits, const TensorD& link_logits, const gt::LabelMaps& labels,
                           const TensorD& inst_weights, const LossConfig& cfg);

}  // namespace pixellink::loss
