#include <gtest/gtest.h>

#include "pixellink/eval.hpp"
#include "test_util.hpp"

using namespace pixellink;
using namespace pixellink::eval;
using geom::Point;

namespace {

Region box(double x0, double y0, double x1, double y1) {
  const std::vector<Point> ring = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  return to_region(ring);
}

gt::Annotation ann(double x0, double y0, double x1, double y1, bool dont_care = false) {
  gt::Annotation a;
  a.quad = {Point{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  a.dont_care = dont_care;
  return a;
}

}  // namespace

TEST(DontCare, CoverageRule) {
  const auto dc = box(0, 0, 10, 10);
  EXPECT_TRUE(filter_dontcare({box(2, 2, 4, 4)}, {dc}, 0.5).empty());
  EXPECT_EQ(filter_dontcare({box(2, 2, 4, 4)}, {}, 0.5).size(), 1u);
  // 30% of the detection lies inside the do-not-care region.
  EXPECT_EQ(filter_dontcare({box(7, 0, 17, 10)}, {dc}, 0.5).size(), 1u);
}

TEST(Matching, ThresholdAndGreedyOrder) {
  // IoU 0.6: [0,10]x[0,10] vs [0,10]x[2.5,12.5] -> 75 / 125.
  EXPECT_EQ(match_greedy({box(0, 2.5, 10, 12.5)}, {box(0, 0, 10, 10)}, 0.5).size(), 1u);
  // IoU just under 0.5.
  const double t = 10.0 / 3.0 + 0.01;
  EXPECT_TRUE(match_greedy({box(0, t, 10, 10 + t)}, {box(0, 0, 10, 10)}, 0.5).empty());

  // One detection against two ground truths at IoU 0.7 and 0.6.
  const auto det = box(0, 0, 10, 10);
  // A vertical overlap of h gives IoU h / (20 - h).
  const double h7 = 20 * 0.7 / 1.7, h6 = 20 * 0.6 / 1.6;
  const std::vector<Region> gts = {box(0, 10 - h6, 10, 20 - h6), box(0, 10 - h7, 10, 20 - h7)};
  EXPECT_NEAR(geom::convex_polygon_iou(*det, *gts[0]), 0.6, 1e-9);
  EXPECT_NEAR(geom::convex_polygon_iou(*det, *gts[1]), 0.7, 1e-9);
  const auto m = match_greedy({det}, gts, 0.5);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].second, 1u);
}

TEST(Matching, OneToOne) {
  const std::vector<Region> dets = {box(0, 0, 10, 10), box(0, 0, 10, 10.5)};
  const auto m = match_greedy(dets, {box(0, 0, 10, 10)}, 0.5);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].first, 0u);
}

TEST(Metrics, Arithmetic) {
  const auto zero = compute_metrics(0, 5, 0);
  EXPECT_EQ(zero.precision, 0);
  EXPECT_EQ(zero.recall, 0);
  EXPECT_EQ(zero.fscore, 0);
  const auto m = compute_metrics(8, 10, 10);
  EXPECT_DOUBLE_EQ(m.recall, 0.8);
  EXPECT_DOUBLE_EQ(m.precision, 0.8);
  EXPECT_NEAR(m.fscore, 0.8, 1e-15);
  const auto p = compute_metrics(3, 3, 3);
  EXPECT_EQ(p.fscore, 1.0);
  const auto u = compute_metrics(2, 7, 3);
  EXPECT_NEAR(u.fscore * (u.precision + u.recall), 2 * u.precision * u.recall, 1e-12);
}

TEST(Dataset, MicroAverage) {
  std::vector<ImageInput> imgs = {
      {"a", {box(0, 0, 10, 10)}, {ann(0, 0, 10, 10)}},
      {"b", {box(50, 50, 60, 60)}, {ann(0, 0, 10, 10)}},
  };
  const auto r = evaluate_dataset(imgs, {});
  EXPECT_DOUBLE_EQ(r.total.recall, 0.5);
  EXPECT_DOUBLE_EQ(r.total.precision, 0.5);
  ASSERT_EQ(r.images.size(), 2u);
  EXPECT_EQ(r.images[0].metrics.fscore, 1.0);

  imgs[1].dets = {box(0, 0, 10, 10)};
  EXPECT_EQ(evaluate_dataset(imgs, {}).total.fscore, 1.0);
  EXPECT_THROW(evaluate_dataset(std::vector<ImageInput>{}, {}), Error);
}

TEST(Dataset, DontCareGroundTruthIsNotCounted) {
  const auto m = evaluate_image({box(0, 0, 10, 10), box(20, 20, 30, 30)},
                                {ann(0, 0, 10, 10), ann(19, 19, 31, 31, true)}, {});
  EXPECT_EQ(m.num_gt, 1u);
  EXPECT_EQ(m.num_det, 1u);
  EXPECT_EQ(m.fscore, 1.0);
}

TEST(Dataset, FromDirectories) {
  testutil::TempDir dir;
  testutil::write_text(dir / "gt/gt_img_1.txt", "0,0,10,0,10,10,0,10,abc\n40,40,50,40,50,50,40,50,###\n");
  testutil::write_text(dir / "gt/gt_img_2.txt", "");
  testutil::write_text(dir / "det/res_img_1.txt", "0,0,10,0,10,10,0,10\n41,41,49,41,49,49,41,49\n");
  testutil::write_text(dir / "det/res_img_2.txt", "");
  const auto r = evaluate_dataset(dir / "gt", dir / "det", {});
  EXPECT_EQ(r.total.matches, 1u);
  EXPECT_EQ(r.total.num_det, 1u);
  EXPECT_EQ(r.total.fscore, 1.0);

  testutil::write_text(dir / "det/res_img_3.txt", "");
  try {
    evaluate_dataset(dir / "gt", dir / "det", {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingPair);
  }
  std::filesystem::create_directories(dir / "empty_gt");
  std::filesystem::create_directories(dir / "empty_det");
  EXPECT_THROW(evaluate_dataset(dir / "empty_gt", dir / "empty_det", {}), Error);
}

TEST(Dataset, ImageIds) {
  EXPECT_EQ(image_id("x/gt_img_12.txt"), "img_12");
  EXPECT_EQ(image_id("res_img_12.txt"), "img_12");
  EXPECT_EQ(image_id("plain.txt"), "plain");
}
