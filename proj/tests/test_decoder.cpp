#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "pixellink/decoder.hpp"
#include "pixellink/presets.hpp"
#include "scenes.hpp"

using namespace pixellink;
using namespace pixellink::decode;

namespace {

BinaryMaps binary(std::size_t h, std::size_t w) {
  return {h, w, std::vector<std::uint8_t>(h * w, 0), std::vector<std::uint8_t>(h * w * 8, 0)};
}

DecodeConfig open_config() {
  DecodeConfig c;
  c.pixel_threshold = 0.5;
  c.link_threshold = 0.5;
  c.min_short_side = 0;
  c.min_area = 0;
  c.scale_back = 1;
  return c;
}

}  // namespace

TEST(Threshold, InclusiveBoundary) {
  DecodeConfig cfg;
  const Tensor pixel({1, 3}, std::vector<float>{0.79f, 0.80f, 0.81f});
  Tensor link({1, 3, 8}, 0.8f);
  const auto b = threshold_maps(pixel, link, cfg);
  EXPECT_EQ(b.pixel, (std::vector<std::uint8_t>{0, 1, 1}));
  for (auto v : b.link) EXPECT_EQ(v, 1);

  const auto zero = threshold_maps(Tensor({2, 2}, 0.0f), Tensor({2, 2, 8}, 0.0f), cfg);
  for (auto v : zero.pixel) EXPECT_EQ(v, 0);
}

TEST(Threshold, RejectsBadProbabilitiesAndShapes) {
  DecodeConfig cfg;
  try {
    threshold_maps(Tensor({1, 1}, 1.5f), Tensor({1, 1, 8}, 0.f), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfRangeProbability);
  }
  EXPECT_THROW(threshold_maps(Tensor({1, 1}, NAN), Tensor({1, 1, 8}, 0.f), cfg), Error);
  EXPECT_THROW(threshold_maps(Tensor({2, 2}, 0.f), Tensor({2, 3, 8}, 0.f), cfg), Error);
}

TEST(Threshold, AcceptsTwoChannelMaps) {
  Tensor pixel({1, 2, 2}, 0.f);
  pixel(0, 0, 1) = 0.9f;
  pixel(0, 0, 0) = 0.1f;
  pixel(0, 1, 0) = 0.9f;
  pixel(0, 1, 1) = 0.1f;
  const auto b = threshold_maps(pixel, Tensor({1, 2, 8, 2}, 0.5f), DecodeConfig{});
  EXPECT_EQ(b.pixel, (std::vector<std::uint8_t>{1, 0}));
}

TEST(LinkComponents, AllLinkedBlockIsOneComponent) {
  auto m = binary(3, 3);
  std::fill(m.pixel.begin(), m.pixel.end(), 1);
  std::fill(m.link.begin(), m.link.end(), 1);
  const auto c = link_components(m);
  EXPECT_EQ(c.count, 1u);
  for (auto l : c.labels) EXPECT_EQ(l, 1);
}

TEST(LinkComponents, AsymmetricLinkRule) {
  // Pixels A=(0,0) and B=(1,0); direction 4 is +x, its opposite is 3.
  auto m = binary(1, 2);
  m.pixel = {1, 1};
  EXPECT_EQ(link_components(m).count, 2u);

  m.link[0 * 8 + 4] = 1;  // A -> B only
  EXPECT_EQ(link_components(m).count, 1u);

  m.link[0 * 8 + 4] = 0;
  m.link[1 * 8 + 3] = 1;  // B -> A only
  EXPECT_EQ(link_components(m).count, 1u);

  m.link[0 * 8 + 4] = 1;  // both
  EXPECT_EQ(link_components(m).count, 1u);
}

TEST(LinkComponents, DiagonalAsymmetricLinks) {
  // (1,0) and (0,1) are diagonal neighbors: direction 5 (-1,+1) from the
  // first, direction 2 (+1,-1) from the second.
  auto m = binary(2, 2);
  m.pixel = {0, 1, 1, 0};
  EXPECT_EQ(link_components(m).count, 2u);
  m.link[1 * 8 + 5] = 1;
  EXPECT_EQ(link_components(m).count, 1u);
  m.link[1 * 8 + 5] = 0;
  m.link[2 * 8 + 2] = 1;
  EXPECT_EQ(link_components(m).count, 1u);
}

TEST(LinkComponents, LinksFromNegativePixelsDoNotCount) {
  auto m = binary(1, 3);
  m.pixel = {1, 0, 1};
  std::fill(m.link.begin(), m.link.end(), 1);
  EXPECT_EQ(link_components(m).count, 2u);
}

TEST(LinkComponents, IdsFollowRowMajorFirstEncounter) {
  auto m = binary(2, 4);
  m.pixel = {0, 0, 0, 1, 1, 0, 0, 1};
  m.link[3 * 8 + 6] = 1;  // (3,0) down to (3,1)
  const auto c = link_components(m);
  EXPECT_EQ(c.count, 2u);
  EXPECT_EQ(c.labels, (std::vector<std::int32_t>{0, 0, 0, 1, 2, 0, 0, 1}));
}

TEST(LinkComponents, MatchesFloodFillOracle) {
  std::mt19937_64 rng(31);
  std::bernoulli_distribution pix(0.6), lnk(0.3);
  for (int trial = 0; trial < 200; ++trial) {
    auto m = binary(32, 32);
    for (auto& v : m.pixel) v = pix(rng);
    for (auto& v : m.link) v = lnk(rng);
    const auto c = link_components(m);
    const auto ref = oracle::flood_fill_components(32, 32, m.pixel, m.link);
    ASSERT_TRUE(oracle::same_partition(c.labels, ref)) << "trial " << trial;
    EXPECT_EQ(c.count, static_cast<std::size_t>(*std::max_element(ref.begin(), ref.end())));
  }
}

TEST(LinkComponents, RaisingLinkThresholdNeverMergesMore) {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<float> u(0, 1);
  Tensor pixel({16, 16}), link({16, 16, 8});
  for (auto& v : pixel.data()) v = u(rng);
  for (auto& v : link.data()) v = u(rng);
  std::size_t prev = 0;
  for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    DecodeConfig cfg = open_config();
    cfg.link_threshold = t;
    const auto n = link_components(threshold_maps(pixel, link, cfg)).count;
    EXPECT_GE(n, prev);
    prev = n;
  }
}

TEST(ExtractBoxes, SinglePixelScaledByFour) {
  auto m = binary(5, 6);
  m.pixel[2 * 6 + 3] = 1;
  auto cfg = open_config();
  cfg.scale_back = 4;
  const auto boxes = extract_boxes(link_components(m), cfg);
  ASSERT_EQ(boxes.size(), 1u);
  EXPECT_NEAR(boxes[0].cx, 14, 1e-12);
  EXPECT_NEAR(boxes[0].cy, 10, 1e-12);
  EXPECT_NEAR(boxes[0].w, 4, 1e-12);
  EXPECT_NEAR(boxes[0].h, 4, 1e-12);
}

TEST(ExtractBoxes, SolidFiveByTwo) {
  auto m = binary(4, 8);
  for (std::size_t y = 1; y < 3; ++y) {
    for (std::size_t x = 1; x < 6; ++x) {
      m.pixel[y * 8 + x] = 1;
      m.link[(y * 8 + x) * 8 + 4] = 1;
      m.link[(y * 8 + x) * 8 + 6] = 1;
    }
  }
  const auto boxes = extract_boxes(link_components(m), open_config());
  ASSERT_EQ(boxes.size(), 1u);
  EXPECT_NEAR(boxes[0].w, 5, 1e-12);
  EXPECT_NEAR(boxes[0].h, 2, 1e-12);
  EXPECT_NEAR(boxes[0].theta, 0, 1e-12);
  EXPECT_NEAR(boxes[0].cx, 3.5, 1e-12);
  EXPECT_NEAR(boxes[0].cy, 2, 1e-12);
}

TEST(ExtractBoxes, LShapeMatchesAngleScan) {
  auto m = binary(8, 8);
  std::vector<geom::Point> corners;
  for (std::size_t y = 0; y < 8; ++y) {
    for (std::size_t x = 0; x < 8; ++x) {
      if (x == 1 || y == 6) {
        m.pixel[y * 8 + x] = 1;
        std::fill_n(m.link.begin() + static_cast<long>((y * 8 + x) * 8), 8, 1);
        for (double dx : {0.0, 1.0}) {
          for (double dy : {0.0, 1.0}) corners.push_back({x + dx, y + dy});
        }
      }
    }
  }
  const auto boxes = extract_boxes(link_components(m), open_config());
  ASSERT_EQ(boxes.size(), 1u);
  const double ref = oracle::angle_scan_min_rect_area(corners);
  EXPECT_LE(boxes[0].area(), ref * (1 + 1e-9));
  EXPECT_GE(boxes[0].area(), ref * 0.995);
}

TEST(PostFilter, DropsSmallBoxes) {
  DecodeConfig cfg;
  const std::vector<geom::OrientedBox> boxes = {{0, 0, 20, 8, 0}, {0, 0, 30, 15, 0}};
  const auto r = post_filter(boxes, cfg);
  EXPECT_EQ(r.dropped, 1u);
  ASSERT_EQ(r.boxes.size(), 1u);
  EXPECT_EQ(r.boxes[0].w, 30);

  const auto none = post_filter(boxes, open_config());
  EXPECT_EQ(none.boxes.size(), 2u);
  EXPECT_EQ(post_filter(r.boxes, cfg).boxes.size(), 1u);
}

TEST(PostFilter, PresetBoundaries) {
  const auto cfg = preset("ic15").decode;
  EXPECT_EQ(cfg.pixel_threshold, 0.8);
  EXPECT_EQ(cfg.link_threshold, 0.8);
  EXPECT_EQ(post_filter({{0, 0, 40, 9.9, 0}}, cfg).dropped, 1u);
  EXPECT_EQ(post_filter({{0, 0, 29.9, 10, 0}}, cfg).dropped, 1u);
  EXPECT_EQ(post_filter({{0, 0, 30, 10, 0}}, cfg).dropped, 0u);

  const auto td = preset("td500").decode;
  EXPECT_EQ(td.link_threshold, 0.7);
  EXPECT_EQ(post_filter({{0, 0, 40, 14.9, 0}}, td).dropped, 1u);
  EXPECT_EQ(post_filter({{0, 0, 40, 15, 0}}, td).dropped, 0u);
  EXPECT_THROW(preset("nope"), Error);
}

TEST(Decode, EmptyAndTwoSeparatedInstances) {
  const auto empty = decode::decode(Tensor({8, 8}, 0.f), Tensor({8, 8, 8}, 0.f), open_config());
  EXPECT_TRUE(empty.boxes.empty());

  // Two instances one pixel apart: the encoder never links across instances.
  gt::Annotation a, b;
  a.quad = {geom::Point{1, 1}, {5, 1}, {5, 4}, {1, 4}};
  b.quad = {geom::Point{6, 1}, {9, 1}, {9, 4}, {6, 4}};
  const auto labels = gt::encode_labels({a, b}, 6, 12);
  const auto r = decode::decode(labels.pixel_tensor(), labels.link_tensor(), open_config());
  ASSERT_EQ(r.boxes.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& q = i == 0 ? a.quad : b.quad;
    const auto ref = geom::min_area_rect(q);
    EXPECT_GE(geom::convex_polygon_iou(geom::to_polygon(r.boxes[i]), geom::to_polygon(ref)), 0.9);
  }
}

TEST(Decode, RoundTripRecoversEachInstance) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const auto scene = scenes::random_scene(rng, 128, 128, 5);
    const auto labels = gt::encode_labels(scene, 128, 128);
    const auto r = decode::decode(labels.pixel_tensor(), labels.link_tensor(), open_config());
    ASSERT_EQ(r.boxes.size(), scene.size());
    for (const auto& ann : scene) {
      const auto ref = geom::to_polygon(geom::min_area_rect(ann.quad));
      double best = 0;
      for (const auto& box : r.boxes) best = std::max(best, geom::convex_polygon_iou(geom::to_polygon(box), ref));
      EXPECT_GE(best, 0.7);
    }
  }
}

TEST(Percentile, LowerInterpolation) {
  std::vector<double> v;
  for (int i = 100; i >= 1; --i) v.push_back(i);
  EXPECT_EQ(percentile_threshold(v, 0.99), 1.0);
  EXPECT_EQ(percentile_threshold(v, 0.5), 50.0);
  EXPECT_EQ(percentile_threshold(v, 1.0), 1.0);
  const std::vector<double> same(7, 4.25);
  EXPECT_EQ(percentile_threshold(same, 0.99), 4.25);
  EXPECT_THROW(percentile_threshold({}, 0.99), Error);
  EXPECT_THROW(percentile_threshold(v, 0.0), Error);
}

TEST(DisjointSetTest, UnionBySizeTracksSizes) {
  DisjointSet ds(6);
  EXPECT_TRUE(ds.unite(0, 1));
  EXPECT_TRUE(ds.unite(2, 1));
  EXPECT_FALSE(ds.unite(0, 2));
  EXPECT_EQ(ds.size_of(2), 3u);
  EXPECT_EQ(ds.find(0), ds.find(2));
  EXPECT_NE(ds.find(0), ds.find(5));
}
