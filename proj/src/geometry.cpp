#include "pixellink/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace pixellink::geom {

namespace {

constexpr double kPi = std::numbers::pi;

double orient(const Point& o, const Point& a, const Point& b) { return cross(a - o, b - o); }

// Collinearity tolerance for hull construction, scaled to the coordinate range.
double hull_epsilon(std::span<const Point> pts) {
  double scale = 1.0;
  for (const auto& p : pts) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
  return 1e-9 * scale * scale;
}

double wrap(double angle, double period) {
  double r = std::fmod(angle, period);
  if (r < 0) r += period;
  if (r >= period) r -= period;
  return r;
}

}  // namespace

Polygon::Polygon(std::vector<Point> vertices) {
  for (const auto& p : vertices) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw Error(ErrorCode::NonFinite, "polygon vertex");
    if (vertices_.empty() || !(vertices_.back() == p)) vertices_.push_back(p);
  }
  while (vertices_.size() > 1 && vertices_.front() == vertices_.back()) vertices_.pop_back();
  if (vertices_.size() < 3) throw Error(ErrorCode::Degenerate, "polygon needs 3 distinct vertices");
  if (signed_area(vertices_) < 0) std::reverse(vertices_.begin(), vertices_.end());
}

std::array<Point, 4> OrientedBox::vertices() const {
  const Point u{std::cos(theta), std::sin(theta)};
  const Point v{-u.y, u.x};
  const Point c{cx, cy};
  const double hw = w / 2, hh = h / 2;
  return {c - u * hw - v * hh, c + u * hw - v * hh, c + u * hw + v * hh, c - u * hw + v * hh};
}

OrientedBox OrientedBox::normalized() const {
  OrientedBox b = *this;
  if (b.w < b.h) {
    std::swap(b.w, b.h);
    b.theta += kPi / 2;
  }
  b.theta = wrap(b.theta, b.w == b.h ? kPi / 2 : kPi);
  return b;
}

OrientedBox OrientedBox::scaled(double factor) const {
  return {cx * factor, cy * factor, w * factor, h * factor, theta};
}

double signed_area(std::span<const Point> ring) {
  double s = 0.0;
  for (std::size_t i = 0, n = ring.size(); i < n; ++i) s += cross(ring[i], ring[(i + 1) % n]);
  return s / 2;
}

double polygon_area(const Polygon& p) { return std::abs(signed_area(p.vertices())); }

double perimeter(const Polygon& p) {
  double s = 0.0;
  for (std::size_t i = 0, n = p.size(); i < n; ++i) {
    const auto d = p[(i + 1) % n] - p[i];
    s += std::hypot(d.x, d.y);
  }
  return s;
}

std::vector<Point> convex_hull_ring(std::span<const Point> points) {
  std::vector<Point> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;

  const double eps = hull_epsilon(pts);
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && orient(hull[k - 2], hull[k - 1], p) <= eps) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && orient(hull[k - 2], hull[k - 1], pts[i]) <= eps) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  if (hull.size() < 3) {
    // Collinear: keep the two extreme points.
    return {pts.front(), pts.back()};
  }
  return hull;
}

Polygon convex_hull(std::span<const Point> points) {
  if (points.empty()) throw Error(ErrorCode::EmptyInput, "convex hull of no points");
  auto ring = convex_hull_ring(points);
  if (ring.size() < 3) throw Error(ErrorCode::Degenerate, "points are collinear or coincident");
  return Polygon(std::move(ring));
}

OrientedBox min_area_rect(std::span<const Point> points) {
  if (points.empty()) throw Error(ErrorCode::EmptyInput, "min_area_rect of no points");
  const auto hull = convex_hull_ring(points);
  if (hull.size() == 1) return {hull[0].x, hull[0].y, 0.0, 0.0, 0.0};
  if (hull.size() == 2) {
    const auto d = hull[1] - hull[0];
    const auto c = (hull[0] + hull[1]) * 0.5;
    return OrientedBox{c.x, c.y, std::hypot(d.x, d.y), 0.0, std::atan2(d.y, d.x)}.normalized();
  }

  const std::size_t n = hull.size();
  auto next = [n](std::size_t i) { return (i + 1) % n; };

  // Calipers: for edge i, `far` maximizes the normal projection, `right`
  // maximizes and `left` minimizes the projection onto the edge direction.
  std::size_t far = 0, right = 0, left = 0;
  double best_area = std::numeric_limits<double>::infinity();
  OrientedBox best;
  for (std::size_t i = 0; i < n; ++i) {
    const Point o = hull[i];
    const Point e = hull[next(i)] - o;
    const double len = std::hypot(e.x, e.y);
    const Point u = e * (1.0 / len);
    const Point nrm{-u.y, u.x};
    auto pu = [&](std::size_t j) { return dot(hull[j] - o, u); };
    auto pn = [&](std::size_t j) { return dot(hull[j] - o, nrm); };

    if (i == 0) {
      for (std::size_t j = 1; j < n; ++j) {
        if (pn(j) > pn(far)) far = j;
        if (pu(j) > pu(right)) right = j;
        if (pu(j) < pu(left)) left = j;
      }
    } else {
      for (std::size_t s = 0; s < n && pn(next(far)) > pn(far); ++s) far = next(far);
      for (std::size_t s = 0; s < n && pu(next(right)) > pu(right); ++s) right = next(right);
      for (std::size_t s = 0; s < n && pu(next(left)) < pu(left); ++s) left = next(left);
    }

    const double lo = pu(left), hi = pu(right), height = pn(far);
    const double area = (hi - lo) * height;
    if (area < best_area) {
      best_area = area;
      const Point c = o + u * ((lo + hi) / 2) + nrm * (height / 2);
      best = OrientedBox{c.x, c.y, hi - lo, height, std::atan2(u.y, u.x)};
    }
  }
  return best.normalized();
}

std::vector<Point> clip_convex(std::span<const Point> subject, std::span<const Point> clip) {
  std::vector<Point> out(subject.begin(), subject.end());
  for (std::size_t i = 0, n = clip.size(); i < n && !out.empty(); ++i) {
    const Point a = clip[i];
    const Point b = clip[(i + 1) % n];
    const Point edge = b - a;
    auto side = [&](const Point& p) { return cross(edge, p - a); };

    std::vector<Point> in;
    in.swap(out);
    for (std::size_t j = 0, m = in.size(); j < m; ++j) {
      const Point cur = in[j];
      const Point prev = in[(j + m - 1) % m];
      const double sc = side(cur), sp = side(prev);
      if (sc >= 0) {
        if (sp < 0) out.push_back(prev + (cur - prev) * (sp / (sp - sc)));
        out.push_back(cur);
      } else if (sp >= 0) {
        out.push_back(prev + (cur - prev) * (sp / (sp - sc)));
      }
    }
  }
  return out;
}

double convex_intersection_area(const Polygon& a, const Polygon& b) {
  const auto ring = clip_convex(a.vertices(), b.vertices());
  return ring.size() < 3 ? 0.0 : std::abs(signed_area(ring));
}

double convex_polygon_iou(const Polygon& a, const Polygon& b) {
  const double inter = convex_intersection_area(a, b);
  const double uni = polygon_area(a) + polygon_area(b) - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

Tensor rasterize_polygon(const Polygon& p, std::size_t height, std::size_t width) {
  Tensor mask({height, width}, 0.0f);
  const auto& v = p.vertices();
  const std::size_t n = v.size();

  // Marks pixel centers x + 0.5 within [lo, hi] on row y.
  auto fill = [&](std::size_t y, double lo, double hi) {
    const double first = std::ceil(lo - 0.5);
    const double last = std::floor(hi - 0.5);
    const double x0 = std::max(first, 0.0);
    const double x1 = std::min(last, static_cast<double>(width) - 1);
    for (double x = x0; x <= x1; x += 1.0) mask(y, static_cast<std::size_t>(x)) = 1.0f;
  };

  std::vector<double> xs;
  for (std::size_t y = 0; y < height; ++y) {
    const double yc = static_cast<double>(y) + 0.5;
    xs.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const Point a = v[i];
      const Point b = v[(i + 1) % n];
      // Half-open crossing rule for the interior spans.
      if ((a.y <= yc) != (b.y <= yc)) xs.push_back(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
      // Boundary points on this scanline count as inside.
      if (a.y == yc && b.y == yc) {
        fill(y, std::min(a.x, b.x), std::max(a.x, b.x));
      } else if (a.y == yc) {
        fill(y, a.x, a.x);
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) fill(y, xs[i], xs[i + 1]);
  }
  return mask;
}

Polygon axis_aligned_bbox(const OrientedBox& b) {
  const auto vs = b.vertices();
  double x0 = vs[0].x, x1 = vs[0].x, y0 = vs[0].y, y1 = vs[0].y;
  for (const auto& p : vs) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  return Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

Polygon to_polygon(const OrientedBox& b) {
  const auto vs = b.vertices();
  return Polygon(std::vector<Point>(vs.begin(), vs.end()));
}

}  // namespace pixellink::geom
