#pragma once

#include <array>
#include <span>
#include <vector>

#include "pixellink/tensor.hpp"

namespace pixellink::geom {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
  Point operator+(const Point& o) const { return {x + o.x, y + o.y}; }
  Point operator-(const Point& o) const { return {x - o.x, y - o.y}; }
  Point operator*(double s) const { return {x * s, y * s}; }
};

inline double cross(const Point& a, const Point& b) { return a.x * b.y - a.y * b.x; }
inline double dot(const Point& a, const Point& b) { return a.x * b.x + a.y * b.y; }

/// Simple polygon with at least three vertices.
///
/// Construction drops consecutive duplicate vertices and reverses the order
/// when needed so the shoelace sum is non-negative ("counter-clockwise" in
/// x-right/y-up terms; clockwise on screen, where y points down).
class Polygon {
 public:
  Polygon() = default;
  /// Throws Error(Degenerate) if fewer than 3 distinct vertices remain.
  explicit Polygon(std::vector<Point> vertices);

  const std::vector<Point>& vertices() const noexcept { return vertices_; }
  std::size_t size() const noexcept { return vertices_.size(); }
  const Point& operator[](std::size_t i) const { return vertices_[i]; }

  friend bool operator==(const Polygon&, const Polygon&) = default;

 private:
  std::vector<Point> vertices_;
};

/// Rotated rectangle. `theta` is the direction of the `w` side.
///
/// Normalized form: w >= h and theta in [0, pi); a square (w == h) has
/// theta reduced into [0, pi/2).
struct OrientedBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
  double theta = 0.0;

  /// Corners in positive-area order, starting at (-w/2, -h/2) in box frame.
  std::array<Point, 4> vertices() const;
  double area() const { return w * h; }
  double short_side() const { return w < h ? w : h; }
  OrientedBox normalized() const;
  OrientedBox scaled(double factor) const;
};

/// Signed shoelace area of an arbitrary vertex ring.
double signed_area(std::span<const Point> ring);
double polygon_area(const Polygon& p);
double perimeter(const Polygon& p);

/// Andrew's monotone chain. Returns the hull ring without collinear
/// vertices; fewer than 3 points means the input was degenerate.
std::vector<Point> convex_hull_ring(std::span<const Point> points);

/// Throws Error(Degenerate) when all inputs are collinear or coincident.
Polygon convex_hull(std::span<const Point> points);

/// Minimum-area enclosing rectangle via rotating calipers over the hull.
/// Collinear input yields h = 0; a single point yields w = h = 0.
OrientedBox min_area_rect(std::span<const Point> points);

/// Sutherland-Hodgman clip of `subject` against the convex ring `clip`
/// (positive orientation). Result may be empty.
std::vector<Point> clip_convex(std::span<const Point> subject, std::span<const Point> clip);

double convex_intersection_area(const Polygon& a, const Polygon& b);
double convex_polygon_iou(const Polygon& a, const Polygon& b);

/// mask(y, x) = 1 iff the pixel center (x + 0.5, y + 0.5) lies inside the
/// polygon or on its boundary.
Tensor rasterize_polygon(const Polygon& p, std::size_t height, std::size_t width);

Polygon axis_aligned_bbox(const OrientedBox& b);
Polygon to_polygon(const OrientedBox& b);

}  // namespace pixellink::geom
