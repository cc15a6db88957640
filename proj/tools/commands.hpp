#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cli_support.hpp"

namespace pixellink::cli {

struct Common {
  Overrides overrides;
  std::optional<std::filesystem::path> config;
  std::optional<std::size_t> jobs;
};

struct EncodeGtArgs {
  std::filesystem::path annot_dir;
  std::filesystem::path out_dir;
  std::size_t image_height = 720;
  std::size_t image_width = 1280;
  std::optional<std::filesystem::path> image_dir;
};

struct DecodeArgs {
  std::optional<std::filesystem::path> pixel;
  std::optional<std::filesystem::path> link;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> input_dir;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::filesystem::path> overlay;
  std::optional<std::filesystem::path> image;
};

struct FuseArgs {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::filesystem::path out_pixel;
  std::filesystem::path out_link;
};

struct LossArgs {
  std::filesystem::path pixel_logits;
  std::filesystem::path link_logits;
  std::string labels_prefix;
  std::optional<std::filesystem::path> weights_out;
};

struct EvalArgs {
  std::filesystem::path gt_dir;
  std::filesystem::path det_dir;
  double iou = 0.5;
  double dontcare_tau = 0.5;
  bool per_image = false;
};

struct AugmentArgs {
  std::optional<std::filesystem::path> image;
  std::optional<std::filesystem::path> annot;
  std::optional<std::filesystem::path> image_dir;
  std::optional<std::filesystem::path> annot_dir;
  std::filesystem::path out_dir;
  std::size_t count = 1;
  std::size_t out_size = 512;
  double rotate_prob = 0.2;
};

struct StatsArgs {
  std::filesystem::path annot_dir;
  std::string feature = "short-side";
  double keep = 0.99;
  double scale = 1.0;
};

int run_encode_gt(const Common& common, const EncodeGtArgs& args);
int run_decode(const Common& common, const DecodeArgs& args);
int run_fuse(const Common& common, const FuseArgs& args);
int run_loss(const Common& common, const LossArgs& args);
int run_eval(const Common& common, const EvalArgs& args);
int run_augment(const Common& common, const AugmentArgs& args);
int run_stats(const Common& common, const StatsArgs& args);

}  // namespace pixellink::cli
