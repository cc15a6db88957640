#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pixellink/geometry.hpp"
#include "pixellink/gt_encoder.hpp"

namespace pixellink::eval {

struct Metrics {
  double recall = 0.0;
  double precision = 0.0;
  double fscore = 0.0;
  std::size_t matches = 0;
  std::size_t num_gt = 0;
  std::size_t num_det = 0;
};

struct Protocol {
  double iou_threshold = 0.5;
  double dontcare_overlap = 0.5;  // drop a detection covered more than this by do-not-care
};

/// Convex region used for scoring; empty when the source collapsed to zero area.
using Region = std::optional<geom::Polygon>;

/// Convex hull of a quad (or any ring), or nullopt when degenerate.
Region to_region(std::span<const geom::Point> ring);

std::vector<Region> filter_dontcare(const std::vector<Region>& dets, const std::vector<Region>& dontcare_gts,
                                    double tau);

/// One-to-one greedy matching in descending IoU, ties by detection index
/// then ground-truth index. Returns (det index, gt index) pairs.
std::vector<std::pair<std::size_t, std::size_t>> match_greedy(const std::vector<Region>& dets,
                                                              const std::vector<Region>& gts, double iou_threshold);

Metrics compute_metrics(std::size_t matches, std::size_t num_gt, std::size_t num_det);

struct ImageResult {
  std::string id;
  Metrics metrics;
};

/// Scores one image: do-not-care filtering, then matching against the
/// remaining ground truth.
Metrics evaluate_image(const std::vector<Region>& dets, const std::vector<gt::Annotation>& gts,
                       const Protocol& protocol);

struct DatasetResult {
  Metrics total;  // micro-averaged
  std::vector<ImageResult> images;
};

/// Micro-average over (id, detections, ground truth) triples.
struct ImageInput {
  std::string id;
  std::vector<Region> dets;
  std::vector<gt::Annotation> gts;
};
DatasetResult evaluate_dataset(const std::vector<ImageInput>& images, const Protocol& protocol);

/// Pairs gt_<id>.txt with res_<id>.txt. Throws MissingPair for an id that
/// appears on one side only and EmptyDataset when no files are found.
DatasetResult evaluate_dataset(const std::filesystem::path& gt_dir, const std::filesystem::path& det_dir,
                               const Protocol& protocol);

/// Reads "x1,y1,...,x4,y4[,extra]" detection lines.
std::vector<Region> load_detections(const std::filesystem::path& path);

/// Image id of an IC15-style file name: strips "gt_"/"res_" and the extension.
std::string image_id(const std::filesystem::path& path);

}  // namespace pixellink::eval
