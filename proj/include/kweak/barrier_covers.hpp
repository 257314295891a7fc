#pragma once

// Per-line barrier search and the two grid cover finders built on it: the
// threshold binary search (BFS) and Min-Max pruning.
//
// A grid segment is barrier-covered by a chain of sensors that (1) all meet
// the segment's strip, (2) are connected in the unit-disk graph, and (3)
// start and end at sensors covering the segment endpoints, or, for an
// endpoint on the region boundary, at sensors meeting the part of the
// boundary inside the strip. Segments lying along the region boundary
// separate nothing and need no barrier.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kweak/field.hpp"
#include "kweak/geometry.hpp"
#include "kweak/grids.hpp"

namespace kweak {

enum class StripMode {
  relative,  ///< strip full width ε·κ
  absolute,  ///< strip full width ε
};

inline double strip_half_width(double epsilon, double kappa, StripMode mode = StripMode::relative) {
  if (epsilon < 0) throw std::invalid_argument("strip_half_width: epsilon must be non-negative");
  return mode == StripMode::relative ? epsilon * kappa / 2.0 : epsilon / 2.0;
}

/// Threshold value that makes searches ignore batteries.
inline constexpr double kIgnoreBattery = -1.0;

struct Cover {
  std::vector<int> sensor_ids;  ///< sorted ascending
  int grid_index = -1;          ///< -1 when not tied to a grid
  double epsilon = 0.0;
  std::string algorithm;
  double b_max = 0.0;  ///< bottleneck battery at discovery (BFS), else min battery
};

struct LineBarrier {
  Segment line;
  std::vector<int> sensor_ids;  ///< path order, source end first
};

/// Battery-independent data for one grid segment.
struct LineContext {
  Segment line;
  Strip strip;
  bool needs_barrier = true;
  std::vector<int> candidates;  ///< sensors meeting the strip, ascending
  std::vector<char> is_source;  ///< indexed like `candidates`
  std::vector<char> is_sink;
};

struct GridContext {
  std::vector<LineContext> lines;
  std::vector<std::vector<int>> lines_of_sensor;  ///< barrier-requiring lines each sensor's disk meets
};

/// Sensors able to anchor a barrier at endpoint `p` of `line`.
inline std::vector<int> endpoint_anchor_set(const SensorField& field, const std::vector<int>& candidates,
                                            const Strip& strip, Point p) {
  const double side = field.region_side();
  std::vector<int> out;
  if (!on_region_boundary(p, side)) {
    for (int id : candidates) {
      if (disk_contains(field[id].disk(), p)) out.push_back(id);
    }
    return out;
  }
  std::vector<Segment> pieces;
  const Segment sides[4] = {{{0, 0}, {side, 0}}, {{side, 0}, {side, side}}, {{0, side}, {side, side}}, {{0, 0}, {0, side}}};
  for (const auto& s : sides) {
    if (point_segment_distance(p, s) > kGeomEps) continue;
    if (auto piece = clip_to_strip(s, strip)) pieces.push_back(*piece);
  }
  for (int id : candidates) {
    const Disk d = field[id].disk();
    if (std::any_of(pieces.begin(), pieces.end(), [&](const Segment& s) { return disk_intersects_segment(d, s); })) {
      out.push_back(id);
    }
  }
  return out;
}

/// Shared state for cover searches over one field: positions, the unit-disk
/// graph and scratch buffers. Batteries are read live from the field, so
/// one instance serves a whole schedule. Not thread-safe.
class CoverSearch {
 public:
  explicit CoverSearch(const SensorField& field)
      : field_(&field), graph_(build_adjacency_graph(field.disks())), index_(field.positions(), 2.0) {
    const auto n = field.size();
    member_.assign(n, 0);
    seen_.assign(n, 0);
    pred_.assign(n, -1);
    excluded_.assign(n, 0);
  }

  const SensorField& field() const { return *field_; }
  const AdjacencyGraph& graph() const { return graph_; }

  LineContext make_line_context(const Segment& line, double half_width) const {
    LineContext lc;
    lc.line = line;
    lc.strip = {line, half_width};
    lc.needs_barrier = !lies_on_region_boundary(line, field_->region_side()) && line.length() > 1e-9;
    const Point mid = 0.5 * (line.a + line.b);
    const double reach = line.length() / 2.0 + half_width + kSensingRadius + 1e-6;
    index_.for_each_within(mid, reach, [&](int id) {
      if (disk_intersects_strip((*field_)[id].disk(), lc.strip)) lc.candidates.push_back(id);
    });
    std::sort(lc.candidates.begin(), lc.candidates.end());
    const auto src = endpoint_anchor_set(*field_, lc.candidates, lc.strip, line.a);
    const auto dst = endpoint_anchor_set(*field_, lc.candidates, lc.strip, line.b);
    lc.is_source.assign(lc.candidates.size(), 0);
    lc.is_sink.assign(lc.candidates.size(), 0);
    for (std::size_t k = 0; k < lc.candidates.size(); ++k) {
      lc.is_source[k] = std::binary_search(src.begin(), src.end(), lc.candidates[k]);
      lc.is_sink[k] = std::binary_search(dst.begin(), dst.end(), lc.candidates[k]);
    }
    return lc;
  }

  GridContext make_grid_context(const Grid& grid, double half_width) const {
    GridContext gc;
    gc.lines_of_sensor.resize(field_->size());
    for (const auto& seg : grid.segments) gc.lines.push_back(make_line_context(seg, half_width));
    for (std::size_t li = 0; li < gc.lines.size(); ++li) {
      if (!gc.lines[li].needs_barrier) continue;
      for (int id : gc.lines[li].candidates) gc.lines_of_sensor[static_cast<std::size_t>(id)].push_back(static_cast<int>(li));
    }
    return gc;
  }

  /// Fewest-hop chain across the line using sensors with battery ≥ b_min and
  /// not excluded. Ties go to the smallest-id predecessor and, among sinks on
  /// the final layer, to the smallest id.
  std::optional<std::vector<int>> shortest_barrier(const LineContext& lc, double b_min) {
    if (!lc.needs_barrier) return std::vector<int>{};
    return search(lc, b_min, /*want_path=*/true);
  }

  bool barrier_exists(const LineContext& lc, double b_min) {
    if (!lc.needs_barrier) return true;
    return search(lc, b_min, /*want_path=*/false).has_value();
  }

  /// Exclusion mask consulted by every search (Min-Max removal trials).
  void set_excluded(int id, bool excluded) { excluded_[static_cast<std::size_t>(id)] = excluded ? 1 : 0; }
  void clear_excluded() { std::fill(excluded_.begin(), excluded_.end(), 0); }

 private:
  // A negative threshold ignores batteries entirely (validity checks on
  // covers whose members may since have been drained).
  bool allowed(int id, double b_min) const {
    if (b_min < 0) return !excluded_[static_cast<std::size_t>(id)];
    const double b = (*field_)[id].battery;
    return !excluded_[static_cast<std::size_t>(id)] && b > kDepleted && b >= b_min - 1e-12;
  }

  std::optional<std::vector<int>> search(const LineContext& lc, double b_min, bool want_path) {
    ++stamp_;
    if (stamp_ == 0) {
      std::fill(member_.begin(), member_.end(), 0);
      std::fill(seen_.begin(), seen_.end(), 0);
      stamp_ = 1;
    }
    std::vector<int> frontier;
    for (std::size_t k = 0; k < lc.candidates.size(); ++k) {
      const int id = lc.candidates[k];
      if (!allowed(id, b_min)) continue;
      member_[static_cast<std::size_t>(id)] = stamp_;
      sink_flag_scratch(id) = lc.is_sink[k];
      if (lc.is_source[k]) {
        frontier.push_back(id);
        seen_[static_cast<std::size_t>(id)] = stamp_;
        pred_[static_cast<std::size_t>(id)] = -1;
      }
    }
    std::vector<int> next;
    while (!frontier.empty()) {
      for (int id : frontier) {
        if (sink_flag_scratch(id)) {
          if (!want_path) return std::vector<int>{};
          std::vector<int> path;
          for (int v = id; v != -1; v = pred_[static_cast<std::size_t>(v)]) path.push_back(v);
          std::reverse(path.begin(), path.end());
          return path;
        }
      }
      next.clear();
      for (int u : frontier) {
        for (int v : graph_.neighbors[static_cast<std::size_t>(u)]) {
          const auto vi = static_cast<std::size_t>(v);
          if (member_[vi] != stamp_ || seen_[vi] == stamp_) continue;
          seen_[vi] = stamp_;
          pred_[vi] = u;
          next.push_back(v);
        }
      }
      std::sort(next.begin(), next.end());
      frontier.swap(next);
    }
    return std::nullopt;
  }

  char& sink_flag_scratch(int id) {
    if (sink_.size() != member_.size()) sink_.assign(member_.size(), 0);
    return sink_[static_cast<std::size_t>(id)];
  }

  const SensorField* field_;
  AdjacencyGraph graph_;
  SpatialHash index_;
  std::vector<std::uint32_t> member_, seen_;
  std::vector<int> pred_;
  std::vector<char> excluded_, sink_;
  std::uint32_t stamp_ = 0;
};

/// Barrier for a single segment; `none` when the strip holds no chain.
inline std::optional<LineBarrier> line_barrier(const SensorField& field, const Segment& line, double strip_half_width,
                                               double b_min) {
  if (!(b_min > 0 && b_min <= 1)) throw std::invalid_argument("line_barrier: b_min must lie in (0, 1]");
  CoverSearch search(field);
  const auto lc = search.make_line_context(line, strip_half_width);
  auto path = search.shortest_barrier(lc, b_min);
  if (!path) return std::nullopt;
  return LineBarrier{line, std::move(*path)};
}

/// Union of shortest barriers over every line at threshold `b`, or none.
inline std::optional<std::vector<int>> cover_at_threshold(CoverSearch& search, const GridContext& gc, double b) {
  std::set<int> ids;
  for (const auto& lc : gc.lines) {
    auto path = search.shortest_barrier(lc, b);
    if (!path) return std::nullopt;
    ids.insert(path->begin(), path->end());
  }
  return std::vector<int>(ids.begin(), ids.end());
}

inline bool feasible_at_threshold(CoverSearch& search, const GridContext& gc, double b) {
  return std::all_of(gc.lines.begin(), gc.lines.end(), [&](const LineContext& lc) { return search.barrier_exists(lc, b); });
}

/// Distinct battery levels ≥ floor among sensors that meet some strip.
inline std::vector<double> battery_levels(const SensorField& field, const GridContext& gc, double floor) {
  std::vector<double> levels;
  for (std::size_t id = 0; id < gc.lines_of_sensor.size(); ++id) {
    if (gc.lines_of_sensor[id].empty()) continue;
    const double b = field.sensors()[id].battery;
    if (b > kDepleted && b >= floor - 1e-12) levels.push_back(b);
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return levels;
}

struct ThresholdCover {
  Cover cover;
  double b_max = 0.0;
};

/// Binary search over battery levels for the largest threshold at which every
/// line still has a barrier; the cover is the union of those barriers.
inline std::optional<ThresholdCover> bfs_cover(CoverSearch& search, const GridContext& gc, double floor = kDepleted) {
  const auto levels = battery_levels(search.field(), gc, floor);
  bool any_line = std::any_of(gc.lines.begin(), gc.lines.end(), [](const LineContext& lc) { return lc.needs_barrier; });
  if (levels.empty() || !any_line) return std::nullopt;
  if (!feasible_at_threshold(search, gc, levels.front())) return std::nullopt;
  std::size_t lo = 0, hi = levels.size() - 1;  // levels[lo] feasible
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    if (feasible_at_threshold(search, gc, levels[mid])) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  auto ids = cover_at_threshold(search, gc, levels[lo]);
  if (!ids || ids->empty()) return std::nullopt;
  ThresholdCover out;
  out.b_max = levels[lo];
  out.cover.sensor_ids = std::move(*ids);
  out.cover.algorithm = "bfs";
  out.cover.b_max = out.b_max;
  return out;
}

inline std::optional<ThresholdCover> bfs_cover(const SensorField& field, const Grid& grid, double strip_half_width) {
  CoverSearch search(field);
  return bfs_cover(search, search.make_grid_context(grid, strip_half_width));
}

/// True when `ids` alone barrier-covers every line (batteries ignored).
inline bool is_grid_cover(CoverSearch& search, const GridContext& gc, const std::vector<int>& ids) {
  const auto n = search.field().size();
  for (std::size_t i = 0; i < n; ++i) search.set_excluded(static_cast<int>(i), true);
  for (int id : ids) search.set_excluded(id, false);
  bool ok = true;
  for (const auto& lc : gc.lines) {
    if (!search.barrier_exists(lc, kIgnoreBattery)) {
      ok = false;
      break;
    }
  }
  search.clear_excluded();
  return ok;
}

/// Min-Max pruning: start from every usable sensor meeting some strip and try
/// removals in decreasing battery order (ties by id); a removal stands when
/// every line the sensor touches still has a barrier.
inline std::optional<Cover> minmax_cover(CoverSearch& search, const GridContext& gc, double floor = kDepleted) {
  const auto& field = search.field();
  const auto n = field.size();
  std::vector<int> pool;
  for (std::size_t id = 0; id < n; ++id) {
    const double b = field.sensors()[id].battery;
    if (!gc.lines_of_sensor[id].empty() && b > kDepleted && b >= floor - 1e-12) pool.push_back(static_cast<int>(id));
  }
  if (pool.empty()) return std::nullopt;
  for (std::size_t i = 0; i < n; ++i) search.set_excluded(static_cast<int>(i), true);
  for (int id : pool) search.set_excluded(id, false);
  auto restore = [&] { search.clear_excluded(); };
  if (!feasible_at_threshold(search, gc, floor)) {
    restore();
    return std::nullopt;
  }
  std::vector<int> order = pool;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (field[a].battery != field[b].battery) return field[a].battery > field[b].battery;
    return a < b;
  });
  std::vector<char> kept(n, 0);
  for (int id : pool) kept[static_cast<std::size_t>(id)] = 1;
  for (int id : order) {
    search.set_excluded(id, true);
    bool still_covered = true;
    for (int li : gc.lines_of_sensor[static_cast<std::size_t>(id)]) {
      if (!search.barrier_exists(gc.lines[static_cast<std::size_t>(li)], floor)) {
        still_covered = false;
        break;
      }
    }
    if (still_covered) {
      kept[static_cast<std::size_t>(id)] = 0;
    } else {
      search.set_excluded(id, false);
    }
  }
  restore();
  Cover c;
  c.algorithm = "minmax";
  double min_b = 1.0;
  for (int id : pool) {
    if (kept[static_cast<std::size_t>(id)]) {
      c.sensor_ids.push_back(id);
      min_b = std::min(min_b, field[id].battery);
    }
  }
  if (c.sensor_ids.empty()) return std::nullopt;
  c.b_max = min_b;
  return c;
}

inline std::optional<Cover> minmax_cover(const SensorField& field, const Grid& grid, double strip_half_width) {
  CoverSearch search(field);
  return minmax_cover(search, search.make_grid_context(grid, strip_half_width));
}

/// A valid cover is minimal when dropping any single member breaks some line.
inline bool is_minimal(CoverSearch& search, const GridContext& gc, const Cover& cover) {
  if (!is_grid_cover(search, gc, cover.sensor_ids)) return false;
  std::vector<int> rest;
  for (std::size_t k = 0; k < cover.sensor_ids.size(); ++k) {
    rest.assign(cover.sensor_ids.begin(), cover.sensor_ids.end());
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
    if (is_grid_cover(search, gc, rest)) return false;
  }
  return true;
}

inline bool is_minimal(const Cover& cover, const SensorField& field, const Grid& grid, double strip_half_width) {
  CoverSearch search(field);
  return is_minimal(search, search.make_grid_context(grid, strip_half_width), cover);
}

// Cover dump: "grid_index epsilon algorithm b_max id1 id2 ..." per line.

inline void write_cover(std::ostream& os, const Cover& c) {
  if (c.grid_index < 0) {
    os << "none";
  } else {
    os << c.grid_index;
  }
  os << ' ' << format_g9(c.epsilon) << ' ' << c.algorithm << ' ' << format_g9(c.b_max);
  for (int id : c.sensor_ids) os << ' ' << id;
  os << '\n';
}

inline Cover parse_cover_line(const std::string& line) {
  std::istringstream is(line);
  std::string grid_tok;
  Cover c;
  if (!(is >> grid_tok >> c.epsilon >> c.algorithm >> c.b_max)) throw std::runtime_error("cover dump: malformed line");
  c.grid_index = grid_tok == "none" ? -1 : std::stoi(grid_tok);
  int id;
  while (is >> id) c.sensor_ids.push_back(id);
  std::sort(c.sensor_ids.begin(), c.sensor_ids.end());
  return c;
}

}  // namespace kweak
