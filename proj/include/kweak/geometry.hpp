#pragma once

// Planar primitives for unit-disk sensor fields: points, disks, segments,
// strips around segments, and the unit-disk adjacency graph.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace kweak {

/// Absolute tolerance applied to every distance comparison. Disks, strips and
/// segments are closed sets, so boundary contact counts.
inline constexpr double kGeomEps = 1e-9;

/// Sensing radius shared by every sensor.
inline constexpr double kSensingRadius = 1.0;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
  friend bool operator==(const Point&, const Point&) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point p) { return std::hypot(p.x, p.y); }
inline double distance(Point a, Point b) { return norm(a - b); }
inline double distance_sq(Point a, Point b) {
  const Point d = a - b;
  return d.x * d.x + d.y * d.y;
}

struct Disk {
  Point center;
  double radius = kSensingRadius;
};

struct Segment {
  Point a;
  Point b;

  double length() const { return distance(a, b); }
};

/// Rectangle of half-width `half_width` around `axis`, measured in the axis
/// frame. There are no end caps: the rectangle spans exactly the segment.
struct Strip {
  Segment axis;
  double half_width = 0.0;
};

/// Distance from `p` to the closed segment `s`.
inline double point_segment_distance(Point p, const Segment& s) {
  const Point d = s.b - s.a;
  const double len_sq = dot(d, d);
  if (len_sq == 0.0) return distance(p, s.a);
  const double t = std::clamp(dot(p - s.a, d) / len_sq, 0.0, 1.0);
  return distance(p, s.a + t * d);
}

/// Distance from `p` to the strip rectangle (zero inside).
inline double point_strip_distance(Point p, const Strip& s) {
  const Point d = s.axis.b - s.axis.a;
  const double len = norm(d);
  if (len == 0.0) return std::max(0.0, distance(p, s.axis.a) - s.half_width);
  const Point u{d.x / len, d.y / len};
  const Point rel = p - s.axis.a;
  const double along = dot(rel, u);
  const double across = std::abs(cross(u, rel));
  const double da = std::max({0.0, -along, along - len});
  const double dc = std::max(0.0, across - s.half_width);
  return std::hypot(da, dc);
}

inline bool disk_intersects_strip(const Disk& d, const Strip& s) {
  return point_strip_distance(d.center, s) <= d.radius + kGeomEps;
}

inline bool disk_intersects_segment(const Disk& d, const Segment& s) {
  return point_segment_distance(d.center, s) <= d.radius + kGeomEps;
}

inline bool disk_contains(const Disk& d, Point p) {
  return distance(d.center, p) <= d.radius + kGeomEps;
}

inline bool point_covered(Point p, std::span<const Disk> disks) {
  return std::any_of(disks.begin(), disks.end(),
                     [p](const Disk& d) { return disk_contains(d, p); });
}

/// Clip `s` to the axis-aligned box [lo, hi]² (Liang-Barsky).
inline std::optional<Segment> clip_to_box(const Segment& s, double lo, double hi) {
  double t0 = 0.0, t1 = 1.0;
  const double dx = s.b.x - s.a.x, dy = s.b.y - s.a.y;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {s.a.x - lo, hi - s.a.x, s.a.y - lo, hi - s.a.y};
  for (int i = 0; i < 4; ++i) {
    if (std::abs(p[i]) < 1e-15) {
      if (q[i] < -kGeomEps) return std::nullopt;
      continue;
    }
    const double r = q[i] / p[i];
    if (p[i] < 0) {
      t0 = std::max(t0, r);
    } else {
      t1 = std::min(t1, r);
    }
  }
  if (t0 > t1) return std::nullopt;
  Segment out{s.a + t0 * Point{dx, dy}, s.a + t1 * Point{dx, dy}};
  auto snap = [lo, hi](double v) {
    if (std::abs(v - lo) < kGeomEps) return lo;
    if (std::abs(v - hi) < kGeomEps) return hi;
    return v;
  };
  out.a = {snap(out.a.x), snap(out.a.y)};
  out.b = {snap(out.b.x), snap(out.b.y)};
  return out;
}

/// Portion of segment `s` lying inside the convex strip rectangle, if any.
inline std::optional<Segment> clip_to_strip(const Segment& s, const Strip& strip) {
  const Point d = strip.axis.b - strip.axis.a;
  const double len = norm(d);
  if (len == 0.0) return std::nullopt;
  const Point u{d.x / len, d.y / len};
  const Point v{-u.y, u.x};
  // Express s in the strip frame, then clip against [0,len] x [-w,w].
  auto to_frame = [&](Point p) {
    const Point r = p - strip.axis.a;
    return Point{dot(r, u), dot(r, v)};
  };
  const Point a = to_frame(s.a), b = to_frame(s.b);
  const double w = strip.half_width;
  double t0 = 0.0, t1 = 1.0;
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {a.x - 0.0, len - a.x, a.y + w, w - a.y};
  for (int i = 0; i < 4; ++i) {
    if (std::abs(p[i]) < 1e-15) {
      if (q[i] < -kGeomEps) return std::nullopt;
      continue;
    }
    const double r = q[i] / p[i];
    if (p[i] < 0) {
      t0 = std::max(t0, r);
    } else {
      t1 = std::min(t1, r);
    }
  }
  if (t0 > t1 + 1e-15) return std::nullopt;
  const Point sd = s.b - s.a;
  return Segment{s.a + t0 * sd, s.a + t1 * sd};
}

/// Bucketed point index for fixed-radius neighbour queries.
class SpatialHash {
 public:
  SpatialHash(std::span<const Point> points, double cell) : points_(points.begin(), points.end()), cell_(cell) {
    if (cell <= 0) throw std::invalid_argument("SpatialHash: cell size must be positive");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      buckets_[key(cell_index(points_[i].x), cell_index(points_[i].y))].push_back(static_cast<int>(i));
    }
  }

  /// Calls fn(index) for every point within `radius` (+eps) of `p`, in
  /// unspecified order.
  template <typename Fn>
  void for_each_within(Point p, double radius, Fn&& fn) const {
    const double r2 = (radius + kGeomEps) * (radius + kGeomEps);
    const std::int64_t x0 = cell_index(p.x - radius), x1 = cell_index(p.x + radius);
    const std::int64_t y0 = cell_index(p.y - radius), y1 = cell_index(p.y + radius);
    for (std::int64_t cx = x0; cx <= x1; ++cx) {
      for (std::int64_t cy = y0; cy <= y1; ++cy) {
        auto it = buckets_.find(key(cx, cy));
        if (it == buckets_.end()) continue;
        for (int i : it->second) {
          if (distance_sq(points_[static_cast<std::size_t>(i)], p) <= r2) fn(i);
        }
      }
    }
  }

  std::vector<int> within(Point p, double radius) const {
    std::vector<int> out;
    for_each_within(p, radius, [&](int i) { out.push_back(i); });
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::int64_t cell_index(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }
  static std::int64_t key(std::int64_t cx, std::int64_t cy) { return cx * 1000003LL + cy; }

  std::vector<Point> points_;
  double cell_;
  std::unordered_map<std::int64_t, std::vector<int>> buckets_;
};

/// Undirected unit-disk graph: one vertex per sensor, an edge whenever two
/// sensing disks touch or overlap. Neighbour lists are sorted ascending.
struct AdjacencyGraph {
  std::vector<std::vector<int>> neighbors;

  std::size_t size() const { return neighbors.size(); }

  bool has_edge(int i, int j) const {
    const auto& n = neighbors.at(static_cast<std::size_t>(i));
    return std::binary_search(n.begin(), n.end(), j);
  }

  std::size_t edge_count() const {
    std::size_t total = 0;
    for (const auto& n : neighbors) total += n.size();
    return total / 2;
  }
};

inline AdjacencyGraph build_adjacency_graph(std::span<const Disk> disks) {
  for (const auto& d : disks) {
    if (std::abs(d.radius - kSensingRadius) > kGeomEps) {
      throw std::invalid_argument("build_adjacency_graph: all sensing radii must be 1");
    }
  }
  std::vector<Point> centers;
  centers.reserve(disks.size());
  for (const auto& d : disks) centers.push_back(d.center);
  const double reach = 2.0 * kSensingRadius;
  SpatialHash index(centers, reach);
  AdjacencyGraph g;
  g.neighbors.resize(disks.size());
  for (std::size_t i = 0; i < centers.size(); ++i) {
    index.for_each_within(centers[i], reach, [&](int j) {
      if (static_cast<std::size_t>(j) != i) g.neighbors[i].push_back(j);
    });
    std::sort(g.neighbors[i].begin(), g.neighbors[i].end());
  }
  return g;
}

}  // namespace kweak
