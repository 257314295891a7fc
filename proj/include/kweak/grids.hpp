#pragma once

// Square and hexagonal tilings clipped to the square region, shift families
// built on an underlying square or triangular lattice of spacing g, and
// total edge length.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "kweak/field.hpp"
#include "kweak/geometry.hpp"

namespace kweak {

enum class GridKind { square, hexagonal };

inline std::string to_string(GridKind k) { return k == GridKind::square ? "square" : "hex"; }

inline GridKind parse_grid_kind(const std::string& s) {
  if (s == "square") return GridKind::square;
  if (s == "hex" || s == "hexagonal") return GridKind::hexagonal;
  throw std::invalid_argument("unknown grid kind '" + s + "'");
}

struct Grid {
  GridKind kind = GridKind::square;
  std::vector<Segment> segments;
  Point offset;
  double kappa = 0.0;
  double region_side = 0.0;
};

struct GridFamily {
  GridKind kind = GridKind::square;
  std::vector<Grid> grids;
  double granularity = 0.0;
  double kappa = 0.0;
};

inline double square_tile_side(double kappa) { return kappa / std::sqrt(2.0); }
inline double hex_side(double kappa) { return kappa / 2.0; }
inline double hex_area(double kappa) { return 3.0 * std::sqrt(3.0) / 8.0 * kappa * kappa; }

inline bool is_horizontal(const Segment& s) { return std::abs(s.a.y - s.b.y) <= kGeomEps; }
inline bool is_vertical(const Segment& s) { return std::abs(s.a.x - s.b.x) <= kGeomEps; }

/// True when `p` lies on the boundary of [0, L]².
inline bool on_region_boundary(Point p, double side) {
  return std::abs(p.x) <= kGeomEps || std::abs(p.y) <= kGeomEps || std::abs(p.x - side) <= kGeomEps ||
         std::abs(p.y - side) <= kGeomEps;
}

/// True when the whole segment runs along one side of [0, L]².
inline bool lies_on_region_boundary(const Segment& s, double side) {
  auto same = [](double u, double v, double target) {
    return std::abs(u - target) <= kGeomEps && std::abs(v - target) <= kGeomEps;
  };
  return same(s.a.x, s.b.x, 0.0) || same(s.a.x, s.b.x, side) || same(s.a.y, s.b.y, 0.0) ||
         same(s.a.y, s.b.y, side);
}

namespace detail {

inline std::vector<double> lattice_positions(double offset, double step, double side) {
  std::vector<double> out;
  const auto first = static_cast<std::int64_t>(std::ceil((0.0 - offset) / step - 1e-9));
  for (std::int64_t j = first;; ++j) {
    double p = offset + static_cast<double>(j) * step;
    if (p > side + kGeomEps) break;
    if (p < -kGeomEps) continue;
    p = std::clamp(p, 0.0, side);
    out.push_back(p);
  }
  return out;
}

inline std::int64_t quantize(double v) { return std::llround(v * 1e7); }

}  // namespace detail

/// Horizontal lines (bottom to top) followed by vertical lines (left to
/// right), every line spanning the full region.
inline Grid square_grid(double side, double kappa, Point offset) {
  if (!(kappa > 1)) throw std::invalid_argument("square_grid: kappa must exceed 1");
  if (!(side > 0)) throw std::invalid_argument("square_grid: L must be positive");
  const double step = square_tile_side(kappa);
  Grid g{GridKind::square, {}, offset, kappa, side};
  for (double y : detail::lattice_positions(offset.y, step, side)) g.segments.push_back({{0.0, y}, {side, y}});
  for (double x : detail::lattice_positions(offset.x, step, side)) g.segments.push_back({{x, 0.0}, {x, side}});
  return g;
}

/// Flat-topped regular hexagons of side κ/2 whose lattice has a vertex at
/// `offset`. Edges shared by two hexagons appear once.
inline Grid hex_grid(double side, double kappa, Point offset) {
  if (!(kappa > 1)) throw std::invalid_argument("hex_grid: kappa must exceed 1");
  if (!(side > 0)) throw std::invalid_argument("hex_grid: L must be positive");
  const double s = hex_side(kappa);
  const double h = std::sqrt(3.0) / 2.0 * s;
  Grid g{GridKind::hexagonal, {}, offset, kappa, side};

  const Point origin_center = offset + Point{s, 0.0};
  std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t, std::int64_t>, Segment> unique_edges;
  const auto i_lo = static_cast<std::int64_t>(std::floor((-2.0 * s - origin_center.x) / (1.5 * s))) - 1;
  const auto i_hi = static_cast<std::int64_t>(std::ceil((side + 2.0 * s - origin_center.x) / (1.5 * s))) + 1;
  for (std::int64_t i = i_lo; i <= i_hi; ++i) {
    const double cx = origin_center.x + 1.5 * s * static_cast<double>(i);
    const double cy0 = origin_center.y + h * static_cast<double>(i);
    const auto j_lo = static_cast<std::int64_t>(std::floor((-2.0 * s - cy0) / (2.0 * h))) - 1;
    const auto j_hi = static_cast<std::int64_t>(std::ceil((side + 2.0 * s - cy0) / (2.0 * h))) + 1;
    for (std::int64_t j = j_lo; j <= j_hi; ++j) {
      const Point c{cx, cy0 + 2.0 * h * static_cast<double>(j)};
      if (c.x < -s - kGeomEps || c.x > side + s + kGeomEps || c.y < -h - kGeomEps || c.y > side + h + kGeomEps) {
        continue;
      }
      Point v[6];
      for (int k = 0; k < 6; ++k) {
        const double ang = static_cast<double>(k) * M_PI / 3.0;
        v[k] = c + Point{s * std::cos(ang), s * std::sin(ang)};
      }
      for (int k = 0; k < 6; ++k) {
        Point a = v[k], b = v[(k + 1) % 6];
        auto ka = std::make_pair(detail::quantize(a.x), detail::quantize(a.y));
        auto kb = std::make_pair(detail::quantize(b.x), detail::quantize(b.y));
        if (kb < ka) {
          std::swap(ka, kb);
          std::swap(a, b);
        }
        unique_edges.try_emplace({ka.first, ka.second, kb.first, kb.second}, Segment{a, b});
      }
    }
  }
  for (const auto& [key, seg] : unique_edges) {
    if (auto clipped = clip_to_box(seg, 0.0, side); clipped && clipped->length() > 1e-7) {
      g.segments.push_back(*clipped);
    }
  }
  return g;
}

inline Grid make_grid(GridKind kind, double side, double kappa, Point offset) {
  return kind == GridKind::square ? square_grid(side, kappa, offset) : hex_grid(side, kappa, offset);
}

/// Offsets of the shift family. Square: (t, t) for t = k·g while
/// t < κ/√2 − g/2, so the wrap-around gap to the next period stays at least
/// g/2. Hex: triangular-lattice points of spacing g inside the hexagon that
/// has the lattice vertex at the origin, one representative per class modulo
/// the tiling period.
inline std::vector<Point> shift_offsets(GridKind kind, double kappa, double g_eff) {
  if (!(g_eff > 0)) throw std::invalid_argument("shift_family: granularity must be positive");
  std::vector<Point> offsets;
  if (kind == GridKind::square) {
    const double period = square_tile_side(kappa);
    offsets.push_back({0.0, 0.0});
    for (int k = 1;; ++k) {
      const double t = k * g_eff;
      if (!(t < period - g_eff / 2.0 - 1e-12)) break;
      offsets.push_back({t, t});
    }
    return offsets;
  }

  const double s = hex_side(kappa);
  const double h = std::sqrt(3.0) / 2.0 * s;
  const Point center{s, 0.0};
  // Closed hexagon test: distance to each of the six edge lines.
  auto inside = [&](Point p) {
    const Point r = p - center;
    for (int k = 0; k < 6; ++k) {
      const double ang = (static_cast<double>(k) + 0.5) * M_PI / 3.0;
      if (r.x * std::cos(ang) + r.y * std::sin(ang) > h + 1e-9) return false;
    }
    return true;
  };
  // Period lattice of the tiling: b1 = (1.5s, h), b2 = (0, 2h).
  auto residue_key = [&](Point p) {
    const double alpha = p.x / (1.5 * s);
    const double beta = (p.y - alpha * h) / (2.0 * h);
    auto wrap = [](double v) {
      double f = v - std::floor(v);
      auto q = std::llround(f * 1e6);
      return q == 1000000 ? std::int64_t{0} : static_cast<std::int64_t>(q);
    };
    return std::make_pair(wrap(alpha), wrap(beta));
  };
  std::vector<Point> candidates;
  const int reach = static_cast<int>(std::ceil(2.5 * s / g_eff)) + 2;
  for (int j = -reach; j <= reach; ++j) {
    for (int i = -reach; i <= reach; ++i) {
      const Point p{g_eff * (i + 0.5 * j), g_eff * (std::sqrt(3.0) / 2.0) * j};
      if (inside(p)) candidates.push_back(p);
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](Point a, Point b) {
    const double na = norm(a), nb = norm(b);
    if (std::abs(na - nb) > 1e-9) return na < nb;
    return std::make_pair(a.y, a.x) < std::make_pair(b.y, b.x);
  });
  std::vector<std::pair<std::int64_t, std::int64_t>> seen;
  for (const Point& p : candidates) {
    const auto key = residue_key(p);
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(key);
    offsets.push_back(p);
  }
  return offsets;
}

inline GridFamily shift_family(GridKind kind, double side, double kappa, double g_eff) {
  GridFamily fam{kind, {}, g_eff, kappa};
  for (const Point& off : shift_offsets(kind, kappa, g_eff)) fam.grids.push_back(make_grid(kind, side, kappa, off));
  return fam;
}

/// Sum of clipped segment lengths, each segment once.
inline double total_edge_length(const Grid& grid) {
  double total = 0.0;
  for (const auto& s : grid.segments) total += s.length();
  return total;
}

/// Sum of tile perimeters inside the region: every interior edge borders two
/// tiles and is counted twice; edges lying on the region boundary are not
/// tile-separating and count zero. Comparable with the closed forms
/// 4√2·L²/κ (square) and (8/√3)·L²/κ (hex).
inline double tiling_edge_length(const Grid& grid) {
  double total = 0.0;
  for (const auto& s : grid.segments) {
    if (!lies_on_region_boundary(s, grid.region_side)) total += 2.0 * s.length();
  }
  return total;
}

inline double square_tel_closed_form(double side, double kappa) { return 4.0 * std::sqrt(2.0) * side * side / kappa; }
inline double hex_tel_closed_form(double side, double kappa) { return 8.0 / std::sqrt(3.0) * side * side / kappa; }

// Grid dump: "kind kappa offset_x offset_y" then "x1 y1 x2 y2" per segment.

inline void write_grid(std::ostream& os, const Grid& grid) {
  os << to_string(grid.kind) << ' ' << format_g9(grid.kappa) << ' ' << format_g9(grid.offset.x) << ' '
     << format_g9(grid.offset.y) << '\n';
  for (const auto& s : grid.segments) {
    os << format_g9(s.a.x) << ' ' << format_g9(s.a.y) << ' ' << format_g9(s.b.x) << ' ' << format_g9(s.b.y) << '\n';
  }
}

inline Grid read_grid(std::istream& is, double region_side) {
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("grid file: missing header");
  std::istringstream hs(header);
  std::string kind;
  Grid g;
  if (!(hs >> kind >> g.kappa >> g.offset.x >> g.offset.y)) throw std::runtime_error("grid file: malformed header");
  g.kind = parse_grid_kind(kind);
  g.region_side = region_side;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Segment s;
    if (!(ls >> s.a.x >> s.a.y >> s.b.x >> s.b.y)) throw std::runtime_error("grid file: malformed segment");
    g.segments.push_back(s);
  }
  return g;
}

}  // namespace kweak
