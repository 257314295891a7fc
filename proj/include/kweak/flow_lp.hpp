#pragma once

// Max-flow LP for square grids.
//
// Sensors meeting a barrier strip are split into (in, out) nodes whose
// internal arc carries at most the sensor's battery. Horizontal flow leaves
// the source, crosses every horizontal line in serpentine order and reaches
// µ; µ turns it into vertical flow that crosses every vertical line and
// reaches the sink. One unit of s→d flow is therefore one cover held for one
// unit of time.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "kweak/barrier_covers.hpp"
#include "kweak/field.hpp"
#include "kweak/grids.hpp"
#include "kweak/simplex.hpp"

namespace kweak {

enum class Commodity : std::uint8_t { horizontal, vertical };
enum class SensorRegion : std::uint8_t { horizontal_only, vertical_only, mixed };

struct FlowArc {
  int tail = 0;
  int head = 0;
  double capacity = 0.0;
  Commodity commodity = Commodity::horizontal;
};

struct InternalArc {
  int in = 0;
  int out = 0;
  double capacity = 0.0;  ///< battery of the sensor
};

/// Node numbering: sensor k owns in = 2k and out = 2k+1; then s, d, µ.
struct FlowNetwork {
  std::vector<int> sensor_ids;  ///< local index -> field id
  std::vector<InternalArc> internal;
  std::vector<SensorRegion> region;
  std::vector<FlowArc> arcs;
  int source = -1, sink = -1, mu = -1;
  int node_count = 0;
  double big_m = 1.0;

  static int in_node(int k) { return 2 * k; }
  static int out_node(int k) { return 2 * k + 1; }
  int sensor_count() const { return static_cast<int>(sensor_ids.size()); }
  /// Local sensor index owning `node`, or -1 for s, d, µ.
  int sensor_of(int node) const { return node < 2 * sensor_count() ? node / 2 : -1; }

  std::string node_name(int node) const {
    if (node == source) return "s";
    if (node == sink) return "d";
    if (node == mu) return "mu";
    const int k = sensor_of(node);
    return (node % 2 == 0 ? "i" : "o") + std::to_string(sensor_ids[static_cast<std::size_t>(k)]);
  }

  /// Empty network over the given sensors; arcs are added afterwards.
  static FlowNetwork with_sensors(std::vector<int> ids, const std::vector<double>& batteries,
                                  std::vector<SensorRegion> regions) {
    if (ids.size() != batteries.size() || ids.size() != regions.size()) {
      throw std::invalid_argument("FlowNetwork: size mismatch");
    }
    FlowNetwork net;
    net.sensor_ids = std::move(ids);
    net.region = std::move(regions);
    const int k = net.sensor_count();
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
      net.internal.push_back({in_node(i), out_node(i), batteries[static_cast<std::size_t>(i)]});
      total += batteries[static_cast<std::size_t>(i)];
    }
    net.source = 2 * k;
    net.sink = 2 * k + 1;
    net.mu = 2 * k + 2;
    net.node_count = 2 * k + 3;
    net.big_m = total + 1.0;
    return net;
  }

  void add_arc(int tail, int head, Commodity c) {
    if (tail < 0 || head < 0 || tail >= node_count || head >= node_count) throw std::invalid_argument("FlowNetwork: bad node");
    arcs.push_back({tail, head, big_m, c});
  }
};

namespace detail {

struct SerpentineLine {
  std::vector<int> members;  ///< local sensor indices meeting the strip
  std::vector<int> start;    ///< anchors at the left (horizontal) / bottom (vertical) end
  std::vector<int> end;      ///< anchors at the right / top end
};

}  // namespace detail

/// Batteries below this stay out of LP networks built by the scheduler; tiny
/// capacities next to unit ones stall the simplex without adding lifetime.
inline constexpr double kLpBatteryFloor = 1e-6;

/// Builds the vertex-split network for a square grid. Only sensors with
/// battery ≥ `floor` take part. Lines along the region boundary need no
/// barrier and are left out of the serpentine.
inline FlowNetwork build_flow_network(CoverSearch& search, const Grid& grid, double strip_half_width,
                                      double floor = kDepleted) {
  if (grid.kind != GridKind::square) throw std::invalid_argument("build_flow_network: only square grids are supported");
  const auto& field = search.field();
  std::vector<Segment> hlines, vlines;
  for (const auto& s : grid.segments) {
    if (lies_on_region_boundary(s, field.region_side()) || s.length() <= 1e-9) continue;
    if (is_horizontal(s)) {
      hlines.push_back(s);
    } else if (is_vertical(s)) {
      vlines.push_back(s);
    } else {
      throw std::invalid_argument("build_flow_network: square grid with an oblique segment");
    }
  }
  std::sort(hlines.begin(), hlines.end(), [](const Segment& a, const Segment& b) { return a.a.y < b.a.y; });
  std::sort(vlines.begin(), vlines.end(), [](const Segment& a, const Segment& b) { return a.a.x < b.a.x; });

  auto usable = [&](int id) { return field.battery(id) > kDepleted && field.battery(id) >= floor - 1e-12; };
  std::vector<LineContext> hctx, vctx;
  for (const auto& s : hlines) hctx.push_back(search.make_line_context(s, strip_half_width));
  for (const auto& s : vlines) vctx.push_back(search.make_line_context(s, strip_half_width));

  std::vector<char> touches_h(field.size(), 0), touches_v(field.size(), 0);
  for (const auto& lc : hctx)
    for (int id : lc.candidates)
      if (usable(id)) touches_h[static_cast<std::size_t>(id)] = 1;
  for (const auto& lc : vctx)
    for (int id : lc.candidates)
      if (usable(id)) touches_v[static_cast<std::size_t>(id)] = 1;

  std::vector<int> ids;
  std::vector<double> batteries;
  std::vector<SensorRegion> regions;
  std::vector<int> local(field.size(), -1);
  for (std::size_t id = 0; id < field.size(); ++id) {
    if (!touches_h[id] && !touches_v[id]) continue;
    local[id] = static_cast<int>(ids.size());
    ids.push_back(static_cast<int>(id));
    batteries.push_back(field.sensors()[id].battery);
    regions.push_back(touches_h[id] && touches_v[id] ? SensorRegion::mixed
                      : touches_h[id]               ? SensorRegion::horizontal_only
                                                    : SensorRegion::vertical_only);
  }
  FlowNetwork net = FlowNetwork::with_sensors(std::move(ids), batteries, std::move(regions));

  std::set<std::tuple<int, int, int>> seen;
  auto arc = [&](int tail, int head, Commodity c) {
    if (seen.insert({tail, head, static_cast<int>(c)}).second) net.add_arc(tail, head, c);
  };

  auto to_lines = [&](const std::vector<LineContext>& ctx) {
    std::vector<detail::SerpentineLine> out;
    for (const auto& lc : ctx) {
      detail::SerpentineLine sl;
      for (std::size_t k = 0; k < lc.candidates.size(); ++k) {
        const int id = lc.candidates[k];
        if (!usable(id)) continue;
        const int li = local[static_cast<std::size_t>(id)];
        sl.members.push_back(li);
        if (lc.is_source[k]) sl.start.push_back(li);
        if (lc.is_sink[k]) sl.end.push_back(li);
      }
      out.push_back(std::move(sl));
    }
    return out;
  };
  const auto hs = to_lines(hctx);
  const auto vs = to_lines(vctx);

  auto strip_arcs = [&](const std::vector<detail::SerpentineLine>& lines, Commodity c) {
    for (const auto& sl : lines) {
      std::vector<char> member(static_cast<std::size_t>(net.sensor_count()), 0);
      for (int k : sl.members) member[static_cast<std::size_t>(k)] = 1;
      for (int k : sl.members) {
        const int id = net.sensor_ids[static_cast<std::size_t>(k)];
        for (int nb : search.graph().neighbors[static_cast<std::size_t>(id)]) {
          const int j = local[static_cast<std::size_t>(nb)];
          if (j < 0 || !member[static_cast<std::size_t>(j)]) continue;
          arc(FlowNetwork::out_node(k), FlowNetwork::in_node(j), c);
        }
      }
    }
  };
  strip_arcs(hs, Commodity::horizontal);
  strip_arcs(vs, Commodity::vertical);

  // Serpentine: line i (1-based) hands over on its far side when i is odd and
  // on its near side when i is even.
  auto serpentine = [&](const std::vector<detail::SerpentineLine>& lines, int entry, int exit, Commodity c) {
    if (lines.empty()) {
      arc(entry, exit, c);
      return;
    }
    for (int k : lines.front().start) arc(entry, FlowNetwork::in_node(k), c);
    for (std::size_t i = 0; i + 1 < lines.size(); ++i) {
      const bool odd = (i % 2) == 0;
      const auto& from = odd ? lines[i].end : lines[i].start;
      const auto& to = odd ? lines[i + 1].end : lines[i + 1].start;
      for (int a : from)
        for (int b : to) arc(FlowNetwork::out_node(a), FlowNetwork::in_node(b), c);
    }
    const bool last_odd = ((lines.size() - 1) % 2) == 0;
    for (int k : last_odd ? lines.back().end : lines.back().start) arc(FlowNetwork::out_node(k), exit, c);
  };
  serpentine(hs, net.source, net.mu, Commodity::horizontal);
  serpentine(vs, net.mu, net.sink, Commodity::vertical);
  return net;
}

inline FlowNetwork build_flow_network(const SensorField& field, const Grid& grid, double strip_half_width) {
  CoverSearch search(field);
  return build_flow_network(search, grid, strip_half_width);
}

/// One variable per arc (x for horizontal, y for vertical), in arc order.
inline LPProblem to_standard_lp(const FlowNetwork& net) {
  LPProblem lp;
  const auto k_count = static_cast<std::size_t>(net.sensor_count());
  std::vector<std::vector<LinearTerm>> cons_h(k_count), cons_v(k_count), cap(k_count);
  LPRow mu_row{{}, 0.0, "conv_mu"}, sd_row{{}, 0.0, "throughput"};
  for (std::size_t a = 0; a < net.arcs.size(); ++a) {
    const auto& arc = net.arcs[a];
    const std::string prefix = arc.commodity == Commodity::horizontal ? "x_" : "y_";
    const int v = lp.add_variable(arc.tail == net.source ? 1.0 : 0.0, arc.capacity,
                                  prefix + net.node_name(arc.tail) + "_" + net.node_name(arc.head));
    auto& cons = arc.commodity == Commodity::horizontal ? cons_h : cons_v;
    if (const int k = net.sensor_of(arc.head); k >= 0) cons[static_cast<std::size_t>(k)].push_back({v, 1.0});
    if (const int k = net.sensor_of(arc.tail); k >= 0) {
      cons[static_cast<std::size_t>(k)].push_back({v, -1.0});
      cap[static_cast<std::size_t>(k)].push_back({v, 1.0});
    }
    if (arc.head == net.mu) mu_row.terms.push_back({v, 1.0});
    if (arc.tail == net.mu) mu_row.terms.push_back({v, -1.0});
    if (arc.tail == net.source) sd_row.terms.push_back({v, 1.0});
    if (arc.head == net.sink) sd_row.terms.push_back({v, -1.0});
  }
  for (std::size_t k = 0; k < k_count; ++k) {
    const std::string name = std::to_string(net.sensor_ids[k]);
    if (!cons_h[k].empty()) lp.equalities.push_back({cons_h[k], 0.0, "consh_" + name});
    if (!cons_v[k].empty()) lp.equalities.push_back({cons_v[k], 0.0, "consv_" + name});
  }
  if (!mu_row.terms.empty()) lp.equalities.push_back(mu_row);
  if (!sd_row.terms.empty()) lp.equalities.push_back(sd_row);
  for (std::size_t k = 0; k < k_count; ++k) {
    if (!cap[k].empty()) lp.inequalities.push_back({cap[k], net.internal[k].capacity, "cap_" + std::to_string(net.sensor_ids[k])});
  }
  return lp;
}

namespace detail {

/// Revised primal simplex for max cᵀf s.t. A f ≤ b, f ≥ 0 with b ≥ 0,
/// columns arriving one at a time. Rows are created on first use.
///
/// Most rows keep their slack basic, so only the working block
/// M = A[tight rows, basic columns] is inverted; B⁻¹ follows from M⁻¹ and
/// the slack identity. Each pivot grows, shrinks or updates M⁻¹ in place.
class PackingMaster {
 public:
  struct Column {
    std::vector<std::pair<int, double>> entries;  ///< (row, coefficient)
    double cost = 1.0;
  };

  explicit PackingMaster(std::size_t max_rows) : cap_(max_rows) { inv_.assign(cap_ * cap_, 0.0); }

  int add_row(double rhs) {
    const std::size_t r = rhs_.size();
    if (r >= cap_) throw std::logic_error("PackingMaster: row capacity exceeded");
    rhs_.push_back(rhs);
    slack_.push_back(rhs);
    y_.push_back(0.0);
    tpos_.push_back(-1);
    row_cols_.emplace_back();
    alpha_row_.push_back(0.0);
    touched_flag_.push_back(0);
    return static_cast<int>(r);
  }

  void add_column(Column c) {
    const auto j = static_cast<int>(columns_.size());
    for (auto [r, a] : c.entries) row_cols_[static_cast<std::size_t>(r)].push_back({j, a});
    columns_.push_back(std::move(c));
    cpos_.push_back(-1);
  }

  double reduced_cost(const Column& c) const {
    double d = c.cost;
    for (auto [r, a] : c.entries) d -= y_[static_cast<std::size_t>(r)] * a;
    return d;
  }

  /// Pivots to optimality over the current columns. Returns false when an
  /// improving direction is unbounded.
  bool optimize() {
    int degenerate_run = 0;
    for (long iter = 0; iter < 10'000'000; ++iter) {
      const bool bland = degenerate_run > 50;
      // Entering: column j (>= 0) or slack of tight position t (encoded -t-1).
      long enter = 0;
      bool have = false;
      double best = kTol;
      for (std::size_t j = 0; j < columns_.size(); ++j) {
        if (cpos_[j] >= 0) continue;
        const double d = reduced_cost(columns_[j]);
        if (d > best) {
          best = d;
          enter = static_cast<long>(j);
          have = true;
          if (bland) break;
        }
      }
      if (!(bland && have)) {
        std::size_t best_row = std::numeric_limits<std::size_t>::max();
        for (std::size_t t = 0; t < tight_.size(); ++t) {
          const double d = -y_[tight_[t]];
          if (bland ? (d > kTol && tight_[t] < best_row) : d > best) {
            best = d;
            enter = -static_cast<long>(t) - 1;
            best_row = tight_[t];
            have = true;
          }
        }
      }
      if (!have) return true;

      const std::size_t k = basic_.size();
      // Direction: alpha over basic columns, alpha_row_ over non-tight rows.
      alpha_.assign(k, 0.0);
      touched_.clear();
      auto touch = [&](std::size_t r, double v) {
        if (!touched_flag_[r]) {
          touched_flag_[r] = 1;
          touched_.push_back(r);
        }
        alpha_row_[r] += v;
      };
      std::size_t enter_t = 0;
      if (enter >= 0) {
        for (auto [r, a] : columns_[static_cast<std::size_t>(enter)].entries) {
          const long t = tpos_[static_cast<std::size_t>(r)];
          if (t >= 0) {
            for (std::size_t i = 0; i < k; ++i) alpha_[i] += a * inv(i, static_cast<std::size_t>(t));
          } else {
            touch(static_cast<std::size_t>(r), a);
          }
        }
      } else {
        enter_t = static_cast<std::size_t>(-enter - 1);
        for (std::size_t i = 0; i < k; ++i) alpha_[i] = inv(i, enter_t);
      }
      for (std::size_t i = 0; i < k; ++i) {
        if (alpha_[i] == 0.0) continue;
        for (auto [r, a] : columns_[basic_[i]].entries) {
          if (tpos_[static_cast<std::size_t>(r)] < 0) touch(static_cast<std::size_t>(r), -a * alpha_[i]);
        }
      }

      // Ratio test; ties by Bland rank (columns by index, then slacks by row).
      const std::size_t n_cols = columns_.size();
      double theta = kInf;
      std::size_t leave_rank = std::numeric_limits<std::size_t>::max();
      bool leave_is_column = false;
      std::size_t leave_index = 0;  // position in basic_ or row
      auto consider = [&](double value, double a, std::size_t rank, bool is_col, std::size_t index) {
        if (a <= 1e-10) return;
        const double ratio = std::max(0.0, value) / a;
        if (ratio < theta - 1e-13 || (ratio <= theta + 1e-13 && rank < leave_rank)) {
          theta = std::min(theta, ratio);
          leave_rank = rank;
          leave_is_column = is_col;
          leave_index = index;
        }
      };
      for (std::size_t i = 0; i < k; ++i) consider(x_[i], alpha_[i], basic_[i], true, i);
      for (std::size_t r : touched_) consider(slack_[r], alpha_row_[r], n_cols + r, false, r);
      if (!std::isfinite(theta)) {
        clear_touched();
        return false;
      }
      degenerate_run = theta <= 1e-9 ? degenerate_run + 1 : 0;

      for (std::size_t i = 0; i < k; ++i) x_[i] -= theta * alpha_[i];
      for (std::size_t r : touched_) slack_[r] -= theta * alpha_row_[r];

      if (enter >= 0 && leave_is_column) {
        pivot_replace_column(leave_index, static_cast<std::size_t>(enter), theta);
      } else if (enter >= 0) {
        pivot_grow(static_cast<std::size_t>(enter), leave_index, theta);
      } else if (leave_is_column) {
        pivot_shrink(enter_t, leave_index, theta);
      } else {
        pivot_swap_row(enter_t, leave_index, theta);
      }
      clear_touched();
      if (++pivots_ % 100 == 0) {
        refactor();
      } else {
        update_duals();
      }
    }
    throw std::runtime_error("PackingMaster: iteration limit");
  }

  /// Rebuilds M⁻¹, x, slacks and duals from the current basis.
  void refactor() {
    const std::size_t k = basic_.size();
    std::vector<double> m(k * k, 0.0), inverse(k * k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
      for (auto [r, a] : columns_[basic_[j]].entries) {
        const long t = tpos_[static_cast<std::size_t>(r)];
        if (t >= 0) m[static_cast<std::size_t>(t) * k + j] = a;
      }
      inverse[j * k + j] = 1.0;
    }
    for (std::size_t c = 0; c < k; ++c) {
      std::size_t p = c;
      for (std::size_t r = c + 1; r < k; ++r)
        if (std::abs(m[r * k + c]) > std::abs(m[p * k + c])) p = r;
      if (std::abs(m[p * k + c]) < 1e-14) throw std::runtime_error("PackingMaster: singular basis");
      if (p != c) {
        for (std::size_t j = 0; j < k; ++j) {
          std::swap(m[p * k + j], m[c * k + j]);
          std::swap(inverse[p * k + j], inverse[c * k + j]);
        }
      }
      const double d = m[c * k + c];
      for (std::size_t j = 0; j < k; ++j) {
        m[c * k + j] /= d;
        inverse[c * k + j] /= d;
      }
      for (std::size_t r = 0; r < k; ++r) {
        if (r == c) continue;
        const double f = m[r * k + c];
        if (f == 0.0) continue;
        for (std::size_t j = 0; j < k; ++j) {
          m[r * k + j] -= f * m[c * k + j];
          inverse[r * k + j] -= f * inverse[c * k + j];
        }
      }
    }
    // Gauss-Jordan on M (rows T, cols C) yields M⁻¹ with rows C, cols T.
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t t = 0; t < k; ++t) inv(i, t) = inverse[i * k + t];
    for (std::size_t i = 0; i < k; ++i) {
      double v = 0.0;
      for (std::size_t t = 0; t < k; ++t) v += inv(i, t) * rhs_[tight_[t]];
      x_[i] = v;
    }
    for (std::size_t r = 0; r < rhs_.size(); ++r) slack_[r] = tpos_[r] >= 0 ? 0.0 : rhs_[r];
    for (std::size_t i = 0; i < k; ++i) {
      for (auto [r, a] : columns_[basic_[i]].entries) {
        if (tpos_[static_cast<std::size_t>(r)] < 0) slack_[static_cast<std::size_t>(r)] -= a * x_[i];
      }
    }
    update_duals();
  }

  const std::vector<double>& duals() const { return y_; }
  long pivots() const { return pivots_; }
  std::size_t rows() const { return rhs_.size(); }
  std::size_t basic_columns() const { return basic_.size(); }

  /// Column activity levels.
  std::vector<double> column_values() const {
    std::vector<double> f(columns_.size(), 0.0);
    for (std::size_t i = 0; i < basic_.size(); ++i) f[basic_[i]] = std::max(0.0, x_[i]);
    return f;
  }

  static constexpr double kTol = 1e-9;

 private:
  double& inv(std::size_t i, std::size_t t) { return inv_[i * cap_ + t]; }

  void clear_touched() {
    for (std::size_t r : touched_) {
      alpha_row_[r] = 0.0;
      touched_flag_[r] = 0;
    }
    touched_.clear();
  }

  void update_duals() {
    for (std::size_t t = 0; t < tight_.size(); ++t) {
      double v = 0.0;
      for (std::size_t i = 0; i < basic_.size(); ++i) v += columns_[basic_[i]].cost * inv(i, t);
      y_[tight_[t]] = v;
    }
  }

  /// v = A[row, C] · M⁻¹ over tight positions.
  std::vector<double> row_times_inverse(std::size_t row) {
    std::vector<double> v(tight_.size(), 0.0);
    for (auto [j, a] : row_cols_[row]) {
      const long i = cpos_[static_cast<std::size_t>(j)];
      if (i < 0) continue;
      for (std::size_t t = 0; t < tight_.size(); ++t) v[t] += a * inv(static_cast<std::size_t>(i), t);
    }
    return v;
  }

  // Entering column replaces the basic column at position p; M changes one column.
  void pivot_replace_column(std::size_t p, std::size_t q, double theta) {
    const std::size_t k = basic_.size();
    const double piv = alpha_[p];
    for (std::size_t t = 0; t < k; ++t) inv(p, t) /= piv;
    for (std::size_t i = 0; i < k; ++i) {
      if (i == p || alpha_[i] == 0.0) continue;
      const double f = alpha_[i];
      for (std::size_t t = 0; t < k; ++t) inv(i, t) -= f * inv(p, t);
    }
    cpos_[basic_[p]] = -1;
    basic_[p] = q;
    cpos_[q] = static_cast<long>(p);
    x_[p] = theta;
  }

  // Entering column, leaving slack of row r: M gains row r and column q.
  void pivot_grow(std::size_t q, std::size_t r, double theta) {
    const std::size_t k = basic_.size();
    const double sigma = alpha_row_[r];
    const auto v = row_times_inverse(r);
    for (std::size_t i = 0; i < k; ++i) {
      const double f = alpha_[i] / sigma;
      if (f != 0.0)
        for (std::size_t t = 0; t < k; ++t) inv(i, t) += f * v[t];
      inv(i, k) = -alpha_[i] / sigma;
    }
    for (std::size_t t = 0; t < k; ++t) inv(k, t) = -v[t] / sigma;
    inv(k, k) = 1.0 / sigma;
    basic_.push_back(q);
    cpos_[q] = static_cast<long>(k);
    x_.push_back(theta);
    tight_.push_back(r);
    tpos_[r] = static_cast<long>(k);
    slack_[r] = 0.0;
  }

  // Entering slack of tight position t0, leaving column at position p: M loses both.
  void pivot_shrink(std::size_t t0, std::size_t p, double theta) {
    const std::size_t k = basic_.size();
    const double piv = inv(p, t0);
    for (std::size_t i = 0; i < k; ++i) {
      if (i == p) continue;
      const double f = inv(i, t0) / piv;
      if (f == 0.0) continue;
      for (std::size_t t = 0; t < k; ++t) inv(i, t) -= f * inv(p, t);
    }
    const std::size_t row = tight_[t0];
    slack_[row] = theta;
    y_[row] = 0.0;
    // Drop row p and column t0 by moving the last ones into their slots.
    const std::size_t last = k - 1;
    for (std::size_t t = 0; t < k; ++t) inv(p, t) = inv(last, t);
    for (std::size_t i = 0; i < k; ++i) inv(i, t0) = inv(i, last);
    const std::size_t leaving = basic_[p];
    basic_[p] = basic_[last];
    x_[p] = x_[last];
    cpos_[basic_[p]] = static_cast<long>(p);
    cpos_[leaving] = -1;
    basic_.pop_back();
    x_.pop_back();
    tight_[t0] = tight_[last];
    tpos_[tight_[t0]] = static_cast<long>(t0);
    tpos_[row] = -1;
    tight_.pop_back();
  }

  // Entering slack of tight position t0, leaving slack of row r: row r replaces it in M.
  void pivot_swap_row(std::size_t t0, std::size_t r, double theta) {
    const std::size_t k = basic_.size();
    const auto v = row_times_inverse(r);
    const double piv = v[t0];
    std::vector<double> col(k);
    for (std::size_t i = 0; i < k; ++i) col[i] = inv(i, t0);
    for (std::size_t i = 0; i < k; ++i) {
      const double f = col[i] / piv;
      if (f == 0.0) continue;
      for (std::size_t t = 0; t < k; ++t) inv(i, t) -= f * (v[t] - (t == t0 ? 1.0 : 0.0));
    }
    const std::size_t old_row = tight_[t0];
    slack_[old_row] = theta;
    y_[old_row] = 0.0;
    tpos_[old_row] = -1;
    tight_[t0] = r;
    tpos_[r] = static_cast<long>(t0);
    slack_[r] = 0.0;
  }

  std::size_t cap_;
  std::vector<double> inv_;  ///< M⁻¹: rows = basic positions, cols = tight positions
  std::vector<double> rhs_, slack_, y_, x_, alpha_, alpha_row_;
  std::vector<long> tpos_, cpos_;
  std::vector<char> touched_flag_;
  std::vector<std::size_t> tight_, basic_, touched_;
  std::vector<std::vector<std::pair<int, double>>> row_cols_;
  std::vector<Column> columns_;
  long pivots_ = 0;
};

struct LayerPath {
  double cost = kInf;
  std::vector<int> arcs;  ///< arc indices in traversal order
};

/// Cheapest walk entry → exit over arcs of one commodity, where entering
/// sensor k costs price[k]. Ties prefer fewer hops, then smaller node ids.
inline LayerPath cheapest_layer_path(const FlowNetwork& net, const std::vector<std::vector<int>>& out_arcs,
                                     Commodity c, int entry, int exit, const std::vector<double>& price) {
  const auto n = static_cast<std::size_t>(net.node_count);
  std::vector<double> dist(n, kInf);
  std::vector<int> hops(n, std::numeric_limits<int>::max()), via(n, -1);
  using Key = std::tuple<double, int, int>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> pq;
  dist[static_cast<std::size_t>(entry)] = 0.0;
  hops[static_cast<std::size_t>(entry)] = 0;
  pq.push({0.0, 0, entry});
  while (!pq.empty()) {
    auto [d, h, u] = pq.top();
    pq.pop();
    const auto ui = static_cast<std::size_t>(u);
    if (d > dist[ui] || (d == dist[ui] && h > hops[ui])) continue;
    if (u == exit) break;
    // Sensor in-nodes step through the internal arc for free (price paid on entry).
    auto relax = [&](int v, double nd, int nh, int arc_index) {
      const auto vi = static_cast<std::size_t>(v);
      if (nd < dist[vi] || (nd == dist[vi] && nh < hops[vi])) {
        dist[vi] = nd;
        hops[vi] = nh;
        via[vi] = arc_index;
        pq.push({nd, nh, v});
      }
    };
    const int k = net.sensor_of(u);
    if (k >= 0 && u == FlowNetwork::in_node(k)) {
      relax(FlowNetwork::out_node(k), d, h, -2 - k);
      continue;
    }
    for (int a : out_arcs[ui]) {
      const auto& arc = net.arcs[static_cast<std::size_t>(a)];
      if (arc.commodity != c) continue;
      const int hk = net.sensor_of(arc.head);
      const double step = hk >= 0 ? price[static_cast<std::size_t>(hk)] : 0.0;
      relax(arc.head, d + step, h + 1, a);
    }
  }
  LayerPath out;
  if (!std::isfinite(dist[static_cast<std::size_t>(exit)])) return out;
  out.cost = dist[static_cast<std::size_t>(exit)];
  for (int v = exit; v != entry;) {
    const int a = via[static_cast<std::size_t>(v)];
    if (a <= -2) {
      v = FlowNetwork::in_node(-2 - a);
      continue;
    }
    out.arcs.push_back(a);
    v = net.arcs[static_cast<std::size_t>(a)].tail;
  }
  std::reverse(out.arcs.begin(), out.arcs.end());
  return out;
}

}  // namespace detail

/// Solves the arc LP of `net` by column generation. Horizontal s→µ paths
/// and vertical µ→d paths are separate columns tied by one row (horizontal
/// flow may not exceed vertical flow); pricing is a node-weighted shortest
/// path in each commodity layer. Returns arc flows in to_standard_lp
/// variable order.
inline LPSolution solve_flow_lp(const FlowNetwork& net) {
  LPSolution sol;
  sol.values.assign(net.arcs.size(), 0.0);
  std::vector<std::vector<int>> out_arcs(static_cast<std::size_t>(net.node_count));
  for (std::size_t a = 0; a < net.arcs.size(); ++a) out_arcs[static_cast<std::size_t>(net.arcs[a].tail)].push_back(static_cast<int>(a));

  const auto k_count = static_cast<std::size_t>(net.sensor_count());
  detail::PackingMaster master(k_count + 1);
  const int link = master.add_row(0.0);
  std::vector<int> row_of(k_count, -1);
  std::vector<double> price(k_count, 0.0);
  std::vector<std::vector<int>> column_arcs;
  std::vector<char> column_is_h;

  auto add_path = [&](const detail::LayerPath& path, bool horizontal) {
    detail::PackingMaster::Column col;
    col.cost = horizontal ? 1.0 : 0.0;
    col.entries.push_back({link, horizontal ? 1.0 : -1.0});
    std::map<int, double> usage;
    for (int a : path.arcs) {
      const int k = net.sensor_of(net.arcs[static_cast<std::size_t>(a)].head);
      if (k >= 0) usage[k] += 1.0;
    }
    for (auto [k, count] : usage) {
      auto& r = row_of[static_cast<std::size_t>(k)];
      if (r < 0) r = master.add_row(net.internal[static_cast<std::size_t>(k)].capacity);
      col.entries.push_back({r, count});
    }
    master.add_column(std::move(col));
    column_arcs.push_back(path.arcs);
    column_is_h.push_back(horizontal ? 1 : 0);
  };

  for (long round = 0;; ++round) {
    const auto& y = master.duals();
    for (std::size_t k = 0; k < k_count; ++k) price[k] = row_of[k] >= 0 ? std::max(0.0, y[static_cast<std::size_t>(row_of[k])]) : 0.0;
    const double y_link = y[static_cast<std::size_t>(link)];
    const auto h = detail::cheapest_layer_path(net, out_arcs, Commodity::horizontal, net.source, net.mu, price);
    const auto v = detail::cheapest_layer_path(net, out_arcs, Commodity::vertical, net.mu, net.sink, price);
    if (!std::isfinite(h.cost) || !std::isfinite(v.cost)) break;  // s and d disconnected
    bool added = false;
    if (1.0 - y_link - h.cost > detail::PackingMaster::kTol) {
      add_path(h, true);
      added = true;
    }
    if (y_link - v.cost > detail::PackingMaster::kTol) {
      add_path(v, false);
      added = true;
    }
    if (!added) break;
    if (!master.optimize()) {
      sol.status = LPStatus::unbounded;
      return sol;
    }
    if (round > 200000) {
      sol.status = LPStatus::iteration_limit;
      return sol;
    }
  }
  master.refactor();
  const auto f = master.column_values();
  double h_total = 0.0, v_total = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) (column_is_h[j] ? h_total : v_total) += f[j];
  // Surplus vertical flow is never useful; scale it down to match.
  const double v_scale = v_total > h_total && v_total > 0.0 ? h_total / v_total : 1.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double flow = column_is_h[j] ? f[j] : f[j] * v_scale;
    if (flow <= 0.0) continue;
    for (int a : column_arcs[j]) sol.values[static_cast<std::size_t>(a)] += flow;
  }
  sol.status = LPStatus::optimal;
  sol.objective = h_total;
  return sol;
}

/// Augmenting-path (Dinic) max flow over every arc of the network with the
/// commodity labels dropped; internal arcs keep their battery capacities.
inline double max_flow_oracle(const FlowNetwork& net) {
  struct Edge {
    int to;
    double cap;
    int rev;
  };
  const auto n = static_cast<std::size_t>(net.node_count);
  std::vector<std::vector<Edge>> g(n);
  auto add = [&](int u, int v, double c) {
    g[static_cast<std::size_t>(u)].push_back({v, c, static_cast<int>(g[static_cast<std::size_t>(v)].size())});
    g[static_cast<std::size_t>(v)].push_back({u, 0.0, static_cast<int>(g[static_cast<std::size_t>(u)].size()) - 1});
  };
  for (const auto& ia : net.internal) add(ia.in, ia.out, ia.capacity);
  for (const auto& a : net.arcs) add(a.tail, a.head, a.capacity);
  const double eps = 1e-12;
  double total = 0.0;
  std::vector<int> level(n), it(n);
  for (;;) {
    std::fill(level.begin(), level.end(), -1);
    std::queue<int> q;
    level[static_cast<std::size_t>(net.source)] = 0;
    q.push(net.source);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (const auto& e : g[static_cast<std::size_t>(u)]) {
        if (e.cap > eps && level[static_cast<std::size_t>(e.to)] < 0) {
          level[static_cast<std::size_t>(e.to)] = level[static_cast<std::size_t>(u)] + 1;
          q.push(e.to);
        }
      }
    }
    if (level[static_cast<std::size_t>(net.sink)] < 0) break;
    std::fill(it.begin(), it.end(), 0);
    auto dfs = [&](auto&& self, int u, double f) -> double {
      if (u == net.sink) return f;
      auto& edges = g[static_cast<std::size_t>(u)];
      for (int& i = it[static_cast<std::size_t>(u)]; i < static_cast<int>(edges.size()); ++i) {
        auto& e = edges[static_cast<std::size_t>(i)];
        if (e.cap <= eps || level[static_cast<std::size_t>(e.to)] != level[static_cast<std::size_t>(u)] + 1) continue;
        const double pushed = self(self, e.to, std::min(f, e.cap));
        if (pushed > eps) {
          e.cap -= pushed;
          g[static_cast<std::size_t>(e.to)][static_cast<std::size_t>(e.rev)].cap += pushed;
          return pushed;
        }
      }
      return 0.0;
    };
    while (const double f = dfs(dfs, net.source, kInf)) {
      if (f <= eps) break;
      total += f;
    }
  }
  return total;
}

struct PathFlow {
  std::vector<int> nodes;       ///< s, in, out, ..., mu, ..., d
  std::vector<int> sensor_ids;  ///< field ids on the path, ascending, unique
  double delta = 0.0;
};

struct FlowDecomposition {
  std::vector<PathFlow> paths;
  double total() const {
    double t = 0.0;
    for (const auto& p : paths) t += p.delta;
    return t;
  }
};

/// Greedy decomposition: walk from s along the arc carrying the most flow
/// (ties to the smaller head id), staying within the commodity of the arc
/// used to enter each sensor. A repeated (node, commodity) state closes a
/// loop, which is cancelled and cut from the walk. Reaching d yields one
/// path whose bottleneck δ is subtracted along it. Any flow left on cycles
/// afterwards is cancelled too. `residual` receives the leftover arc flows.
inline FlowDecomposition decompose_paths(const FlowNetwork& net, const LPSolution& solution,
                                         std::vector<double>* residual = nullptr) {
  if (solution.status != LPStatus::optimal) throw std::invalid_argument("decompose_paths: solution is not optimal");
  if (solution.values.size() != net.arcs.size()) throw std::invalid_argument("decompose_paths: value count mismatch");
  constexpr double tol = 1e-9;
  std::vector<double> flow = solution.values;
  for (auto& f : flow) f = std::max(0.0, f);
  std::vector<std::vector<int>> out_arcs(static_cast<std::size_t>(net.node_count));
  for (std::size_t a = 0; a < net.arcs.size(); ++a) out_arcs[static_cast<std::size_t>(net.arcs[a].tail)].push_back(static_cast<int>(a));

  // Outgoing candidates from a node given the commodity we arrived with.
  auto next_arc = [&](int node, Commodity c) {
    int best = -1;
    const int k = net.sensor_of(node);
    const int from = k >= 0 ? FlowNetwork::out_node(k) : node;
    for (int a : out_arcs[static_cast<std::size_t>(from)]) {
      const auto& arc = net.arcs[static_cast<std::size_t>(a)];
      if (node != net.mu && node != net.source && arc.commodity != c) continue;
      if (flow[static_cast<std::size_t>(a)] <= tol) continue;
      if (best < 0) {
        best = a;
        continue;
      }
      const auto& b = net.arcs[static_cast<std::size_t>(best)];
      const double fa = flow[static_cast<std::size_t>(a)], fb = flow[static_cast<std::size_t>(best)];
      if (fa > fb || (fa == fb && arc.head < b.head)) best = a;
    }
    return best;
  };
  auto out_of_source = [&] {
    double t = 0.0;
    for (int a : out_arcs[static_cast<std::size_t>(net.source)]) t += flow[static_cast<std::size_t>(a)];
    return t;
  };
  auto state_of = [&](int node, Commodity c) { return static_cast<long>(node) * 2 + static_cast<long>(c); };

  FlowDecomposition dec;
  long guard = 0;
  while (out_of_source() > tol && guard++ < 1'000'000) {
    std::vector<int> path_arcs;
    std::map<long, std::size_t> position;  // state -> index into path_arcs where it was entered
    int node = net.source;
    Commodity c = Commodity::horizontal;
    position[state_of(node, c)] = 0;
    bool reached = false;
    while (true) {
      const int a = next_arc(node, c);
      if (a < 0) break;
      const auto& arc = net.arcs[static_cast<std::size_t>(a)];
      path_arcs.push_back(a);
      node = arc.head;
      c = arc.commodity;
      if (node == net.sink) {
        reached = true;
        break;
      }
      const long st = state_of(node, c);
      if (auto it = position.find(st); it != position.end()) {
        // Cancel the loop path_arcs[it->second ..] and resume from `node`.
        const std::size_t from = it->second;
        double loop = kInf;
        for (std::size_t i = from; i < path_arcs.size(); ++i) loop = std::min(loop, flow[static_cast<std::size_t>(path_arcs[i])]);
        for (std::size_t i = from; i < path_arcs.size(); ++i) flow[static_cast<std::size_t>(path_arcs[i])] -= loop;
        for (std::size_t i = from; i < path_arcs.size(); ++i) {
          const auto& la = net.arcs[static_cast<std::size_t>(path_arcs[i])];
          if (state_of(la.head, la.commodity) != st) position.erase(state_of(la.head, la.commodity));
        }
        path_arcs.resize(from);
        continue;
      }
      position[st] = path_arcs.size();
    }
    if (!reached) {
      // Numerical residue: drop the stranded prefix.
      for (int a : path_arcs) {
        if (flow[static_cast<std::size_t>(a)] <= 1e-7) flow[static_cast<std::size_t>(a)] = 0.0;
      }
      if (path_arcs.empty()) break;
      flow[static_cast<std::size_t>(path_arcs.back())] = 0.0;
      continue;
    }
    double delta = kInf;
    for (int a : path_arcs) delta = std::min(delta, flow[static_cast<std::size_t>(a)]);
    for (int a : path_arcs) {
      auto& f = flow[static_cast<std::size_t>(a)];
      f -= delta;
      if (f < 1e-12) f = 0.0;
    }
    PathFlow pf;
    pf.delta = delta;
    pf.nodes.push_back(net.source);
    std::set<int> ids;
    for (int a : path_arcs) {
      const int head = net.arcs[static_cast<std::size_t>(a)].head;
      const int k = net.sensor_of(head);
      pf.nodes.push_back(head);
      if (k >= 0) {
        pf.nodes.push_back(FlowNetwork::out_node(k));
        ids.insert(net.sensor_ids[static_cast<std::size_t>(k)]);
      }
    }
    pf.sensor_ids.assign(ids.begin(), ids.end());
    dec.paths.push_back(std::move(pf));
  }

  // Remaining positive flow sits on cycles; cancel them.
  for (std::size_t start = 0; start < flow.size(); ++start) {
    while (flow[start] > tol) {
      std::vector<int> walk{static_cast<int>(start)};
      std::map<long, std::size_t> pos;
      const auto& first = net.arcs[start];
      pos[state_of(first.tail, first.commodity)] = 0;
      int node = first.head;
      Commodity c = first.commodity;
      bool cancelled = false;
      for (int steps = 0; steps < 4 * net.node_count + 8; ++steps) {
        const long st = state_of(node, c);
        if (auto it = pos.find(st); it != pos.end()) {
          double m = kInf;
          for (std::size_t i = it->second; i < walk.size(); ++i) m = std::min(m, flow[static_cast<std::size_t>(walk[i])]);
          for (std::size_t i = it->second; i < walk.size(); ++i) flow[static_cast<std::size_t>(walk[i])] -= m;
          cancelled = true;
          break;
        }
        pos[st] = walk.size();
        const int a = next_arc(node, c);
        if (a < 0) break;
        walk.push_back(a);
        node = net.arcs[static_cast<std::size_t>(a)].head;
        c = net.arcs[static_cast<std::size_t>(a)].commodity;
      }
      if (!cancelled) flow[start] = 0.0;  // dead end: numerical residue
    }
  }
  if (residual) *residual = flow;
  return dec;
}

}  // namespace kweak
