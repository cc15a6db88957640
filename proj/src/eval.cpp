#include "pixellink/eval.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace pixellink::eval {

namespace {

double region_area(const Region& r) { return r ? geom::polygon_area(*r) : 0.0; }

double region_iou(const Region& a, const Region& b) {
  return a && b ? geom::convex_polygon_iou(*a, *b) : 0.0;
}

std::map<std::string, std::filesystem::path> list_by_id(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::IoFailure, "not a directory: " + dir.string());
  std::map<std::string, std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") out[image_id(entry.path())] = entry.path();
  }
  return out;
}

}  // namespace

Region to_region(std::span<const geom::Point> ring) {
  const auto hull = geom::convex_hull_ring(ring);
  if (hull.size() < 3) return std::nullopt;
  return geom::Polygon(hull);
}

std::vector<Region> filter_dontcare(const std::vector<Region>& dets, const std::vector<Region>& dontcare_gts,
                                    double tau) {
  std::vector<Region> out;
  for (const auto& d : dets) {
    const double area = region_area(d);
    bool covered = false;
    for (const auto& g : dontcare_gts) {
      if (area > 0 && g && geom::convex_intersection_area(*d, *g) / area > tau) {
        covered = true;
        break;
      }
    }
    if (!covered) out.push_back(d);
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> match_greedy(const std::vector<Region>& dets,
                                                              const std::vector<Region>& gts, double iou_threshold) {
  std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
  for (std::size_t d = 0; d < dets.size(); ++d) {
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const double iou = region_iou(dets[d], gts[g]);
      if (iou >= iou_threshold && iou > 0) candidates.emplace_back(iou, d, g);
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    return std::make_pair(std::get<1>(a), std::get<2>(a)) < std::make_pair(std::get<1>(b), std::get<2>(b));
  });
  std::vector<bool> det_used(dets.size()), gt_used(gts.size());
  std::vector<std::pair<std::size_t, std::size_t>> matches;
  for (const auto& [iou, d, g] : candidates) {
    if (det_used[d] || gt_used[g]) continue;
    det_used[d] = gt_used[g] = true;
    matches.emplace_back(d, g);
  }
  return matches;
}

Metrics compute_metrics(std::size_t matches, std::size_t num_gt, std::size_t num_det) {
  Metrics m;
  m.matches = matches;
  m.num_gt = num_gt;
  m.num_det = num_det;
  m.recall = num_gt ? static_cast<double>(matches) / static_cast<double>(num_gt) : 0.0;
  m.precision = num_det ? static_cast<double>(matches) / static_cast<double>(num_det) : 0.0;
  const double s = m.recall + m.precision;
  m.fscore = s > 0 ? 2 * m.recall * m.precision / s : 0.0;
  return m;
}

Metrics evaluate_image(const std::vector<Region>& dets, const std::vector<gt::Annotation>& gts,
                       const Protocol& protocol) {
  std::vector<Region> care, dontcare;
  for (const auto& a : gts) (a.dont_care ? dontcare : care).push_back(to_region(a.quad));
  const auto kept = filter_dontcare(dets, dontcare, protocol.dontcare_overlap);
  const auto matches = match_greedy(kept, care, protocol.iou_threshold);
  return compute_metrics(matches.size(), care.size(), kept.size());
}

DatasetResult evaluate_dataset(const std::vector<ImageInput>& images, const Protocol& protocol) {
  if (images.empty()) throw Error(ErrorCode::EmptyDataset, "no images to evaluate");
  DatasetResult out;
  std::size_t matches = 0, num_gt = 0, num_det = 0;
  for (const auto& img : images) {
    const auto m = evaluate_image(img.dets, img.gts, protocol);
    matches += m.matches;
    num_gt += m.num_gt;
    num_det += m.num_det;
    out.images.push_back({img.id, m});
  }
  out.total = compute_metrics(matches, num_gt, num_det);
  return out;
}

DatasetResult evaluate_dataset(const std::filesystem::path& gt_dir, const std::filesystem::path& det_dir,
                               const Protocol& protocol) {
  const auto gts = list_by_id(gt_dir);
  const auto dets = list_by_id(det_dir);
  for (const auto& [id, path] : dets) {
    if (!gts.contains(id)) throw Error(ErrorCode::MissingPair, "no ground truth for " + path.string());
  }
  std::vector<ImageInput> images;
  for (const auto& [id, path] : gts) {
    const auto it = dets.find(id);
    if (it == dets.end()) throw Error(ErrorCode::MissingPair, "no detections for " + path.string());
    images.push_back({id, load_detections(it->second), gt::load_annotations(path)});
  }
  return evaluate_dataset(images, protocol);
}

std::vector<Region> load_detections(const std::filesystem::path& path) {
  std::vector<Region> out;
  for (const auto& a : gt::load_annotations(path)) out.push_back(to_region(a.quad));
  return out;
}

std::string image_id(const std::filesystem::path& path) {
  std::string stem = path.stem().string();
  for (std::string_view prefix : {"gt_", "res_"}) {
    if (stem.starts_with(prefix)) return stem.substr(prefix.size());
  }
  return stem;
}

}  // namespace pixellink::eval
