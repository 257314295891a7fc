#pragma once

// Raster oracle for κ-weak coverage: sample cell centers, group uncovered
// cells into 4-connected components and measure each component's diameter.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kweak/field.hpp"
#include "kweak/geometry.hpp"

namespace kweak {

inline constexpr double kDefaultCellSize = 0.1;

struct CoverageMask {
  double cell_size = kDefaultCellSize;
  double region_side = 0.0;
  int cols = 0;
  int rows = 0;
  std::vector<std::uint8_t> covered;  ///< row-major, row = y index

  bool at(int col, int row) const { return covered[static_cast<std::size_t>(row) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(col)] != 0; }

  /// Center of a cell; a clipped last cell uses the middle of its clipped extent.
  double center(int index) const {
    const double lo = index * cell_size;
    return std::min(lo + 0.5 * cell_size, 0.5 * (lo + region_side));
  }
  Point center(int col, int row) const { return {center(col), center(row)}; }

  std::size_t uncovered_count() const {
    return static_cast<std::size_t>(std::count(covered.begin(), covered.end(), std::uint8_t{0}));
  }
};

/// Covered-cell bitmap for the given active sensors.
inline CoverageMask rasterize(const SensorField& field, const std::vector<int>& active_ids, double cell_size) {
  if (!(cell_size > 0)) throw std::invalid_argument("rasterize: cell_size must be positive");
  CoverageMask mask;
  mask.cell_size = cell_size;
  mask.region_side = field.region_side();
  const int n = static_cast<int>(std::ceil(field.region_side() / cell_size - 1e-9));
  mask.cols = mask.rows = std::max(n, 1);
  mask.covered.assign(static_cast<std::size_t>(mask.cols) * static_cast<std::size_t>(mask.rows), 0);
  for (int id : active_ids) {
    const Disk d = field[id].disk();
    const int c0 = std::max(0, static_cast<int>(std::floor((d.center.x - d.radius) / cell_size)) - 1);
    const int c1 = std::min(mask.cols - 1, static_cast<int>(std::floor((d.center.x + d.radius) / cell_size)) + 1);
    const int r0 = std::max(0, static_cast<int>(std::floor((d.center.y - d.radius) / cell_size)) - 1);
    const int r1 = std::min(mask.rows - 1, static_cast<int>(std::floor((d.center.y + d.radius) / cell_size)) + 1);
    for (int r = r0; r <= r1; ++r) {
      const double y = mask.center(r);
      for (int c = c0; c <= c1; ++c) {
        auto& cell = mask.covered[static_cast<std::size_t>(r) * static_cast<std::size_t>(mask.cols) + static_cast<std::size_t>(c)];
        if (!cell && disk_contains(d, {mask.center(c), y})) cell = 1;
      }
    }
  }
  return mask;
}

inline double brute_force_diameter(const std::vector<Point>& pts) {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, distance_sq(pts[i], pts[j]));
  return std::sqrt(best);
}

/// Andrew's monotone chain; counter-clockwise, no collinear points.
inline std::vector<Point> convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end(), [](Point a, Point b) { return a.x == b.x && a.y == b.y; }), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i - 1] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

/// Rotating calipers over a convex polygon (counter-clockwise).
inline double hull_diameter(const std::vector<Point>& hull) {
  const std::size_t n = hull.size();
  if (n < 2) return 0.0;
  if (n == 2) return distance(hull[0], hull[1]);
  double best = 0.0;
  std::size_t j = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = hull[i], b = hull[(i + 1) % n];
    while (std::abs(cross(b - a, hull[(j + 1) % n] - a)) > std::abs(cross(b - a, hull[j] - a))) j = (j + 1) % n;
    best = std::max({best, distance_sq(a, hull[j]), distance_sq(b, hull[j])});
  }
  return std::sqrt(best);
}

inline constexpr std::size_t kBruteForceDiameterLimit = 64;

struct Hole {
  std::size_t cells = 0;
  double diameter = 0.0;
};

struct HoleReport {
  std::vector<Hole> holes;
  double max_diameter = 0.0;
};

/// 4-connected uncovered components of the mask with their diameters.
inline HoleReport find_holes(const CoverageMask& mask) {
  HoleReport report;
  const auto cols = static_cast<std::size_t>(mask.cols), rows = static_cast<std::size_t>(mask.rows);
  std::vector<std::uint8_t> seen(cols * rows, 0);
  std::vector<std::size_t> stack;
  std::vector<Point> pts, extremes;
  for (std::size_t start = 0; start < cols * rows; ++start) {
    if (mask.covered[start] || seen[start]) continue;
    pts.clear();
    // Per-row extreme columns suffice for the hull of a raster component.
    std::vector<std::pair<int, int>> row_span(rows, {-1, -1});
    stack.push_back(start);
    seen[start] = 1;
    while (!stack.empty()) {
      const std::size_t cell = stack.back();
      stack.pop_back();
      const int c = static_cast<int>(cell % cols), r = static_cast<int>(cell / cols);
      pts.push_back(mask.center(c, r));
      auto& span = row_span[static_cast<std::size_t>(r)];
      if (span.first < 0 || c < span.first) span.first = c;
      if (span.second < 0 || c > span.second) span.second = c;
      auto visit = [&](std::size_t next) {
        if (!mask.covered[next] && !seen[next]) {
          seen[next] = 1;
          stack.push_back(next);
        }
      };
      if (c > 0) visit(cell - 1);
      if (static_cast<std::size_t>(c) + 1 < cols) visit(cell + 1);
      if (r > 0) visit(cell - cols);
      if (static_cast<std::size_t>(r) + 1 < rows) visit(cell + cols);
    }
    Hole hole;
    hole.cells = pts.size();
    if (pts.size() <= kBruteForceDiameterLimit) {
      hole.diameter = brute_force_diameter(pts);
    } else {
      extremes.clear();
      for (std::size_t r = 0; r < rows; ++r) {
        const auto [lo, hi] = row_span[r];
        if (lo < 0) continue;
        extremes.push_back(mask.center(lo, static_cast<int>(r)));
        extremes.push_back(mask.center(hi, static_cast<int>(r)));
      }
      hole.diameter = hull_diameter(convex_hull(extremes));
    }
    report.max_diameter = std::max(report.max_diameter, hole.diameter);
    report.holes.push_back(hole);
  }
  return report;
}

struct VerificationResult {
  bool pass = false;
  HoleReport report;
  double threshold = 0.0;
  double kappa = 0.0;
  double epsilon = 0.0;
  double cell_size = kDefaultCellSize;
};

inline double kappa_weak_threshold(double kappa, double epsilon, double cell_size) {
  return (1.0 + epsilon) * kappa + 2.0 * cell_size * std::sqrt(2.0);
}

/// Passes when every uncovered component is narrower than (1+ε)κ plus the
/// raster slack.
inline VerificationResult verify_kappa_weak(const SensorField& field, const std::vector<int>& active_ids, double kappa,
                                            double epsilon, double cell_size = kDefaultCellSize) {
  if (!(kappa > 0)) throw std::invalid_argument("verify_kappa_weak: kappa must be positive");
  if (!(cell_size > 0) || cell_size > kappa / 20.0 + 1e-12) {
    throw std::invalid_argument("verify_kappa_weak: cell_size must lie in (0, kappa/20]");
  }
  VerificationResult out;
  out.kappa = kappa;
  out.epsilon = epsilon;
  out.cell_size = cell_size;
  out.threshold = kappa_weak_threshold(kappa, epsilon, cell_size);
  out.report = find_holes(rasterize(field, active_ids, cell_size));
  out.pass = out.report.max_diameter < out.threshold;
  return out;
}

inline nlohmann::json to_json(const VerificationResult& v) {
  return {{"pass", v.pass},
          {"max_diameter", v.report.max_diameter},
          {"hole_count", v.report.holes.size()},
          {"cell_size", v.cell_size},
          {"kappa", v.kappa},
          {"epsilon", v.epsilon}};
}

}  // namespace kweak
