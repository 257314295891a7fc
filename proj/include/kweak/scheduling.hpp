#pragma once

// Activation policies and the round-robin grid loop that accumulates lifetime.

#include <algorithm>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kweak/barrier_covers.hpp"
#include "kweak/field.hpp"
#include "kweak/flow_lp.hpp"
#include "kweak/grids.hpp"

namespace kweak {

enum class Policy { uniform, nonuniform, nonpreemptive };
enum class Algorithm { minmax, bfs, lp };

inline std::string to_string(Policy p) {
  switch (p) {
    case Policy::uniform: return "uniform";
    case Policy::nonuniform: return "nonuniform";
    case Policy::nonpreemptive: return "nonpreemptive";
  }
  return "?";
}

inline Policy parse_policy(const std::string& s) {
  if (s == "uniform") return Policy::uniform;
  if (s == "nonuniform" || s == "non-uniform") return Policy::nonuniform;
  if (s == "nonpreemptive" || s == "non-preemptive") return Policy::nonpreemptive;
  throw std::invalid_argument("unknown policy '" + s + "'");
}

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::minmax: return "minmax";
    case Algorithm::bfs: return "bfs";
    case Algorithm::lp: return "lp";
  }
  return "?";
}

inline Algorithm parse_algorithm(const std::string& s) {
  if (s == "minmax" || s == "min-max") return Algorithm::minmax;
  if (s == "bfs") return Algorithm::bfs;
  if (s == "lp") return Algorithm::lp;
  throw std::invalid_argument("unknown algorithm '" + s + "'");
}

struct ScheduleEntry {
  Cover cover;
  double delta = 0.0;
  Policy policy = Policy::nonuniform;
};

struct GridStats {
  int covers = 0;
  double lifetime = 0.0;
};

struct ScheduleResult {
  std::vector<ScheduleEntry> entries;
  double lifetime = 0.0;
  Policy policy = Policy::nonuniform;
  std::string algorithm;
  std::vector<GridStats> per_grid;
  int passes = 0;
};

struct ScheduleParams {
  double kappa = 10.0;
  double epsilon = 0.0;
  StripMode strip_mode = StripMode::relative;
  int max_load = 2;    ///< m, uniform policy
  double decay = 1.0;  ///< d, non-uniform policy
};

namespace detail {

inline double min_battery(const SensorField& field, const Cover& cover) {
  if (cover.sensor_ids.empty()) throw std::invalid_argument("activation: empty cover");
  double b = 1.0;
  for (int id : cover.sensor_ids) b = std::min(b, field.battery(id));
  return b;
}

inline void drain_cover(SensorField& field, const Cover& cover, double delta) {
  for (int id : cover.sensor_ids) field.drain(id, std::min(delta, field.battery(id)));
}

}  // namespace detail

/// δ = 1/m; every member loses 1/m.
inline ScheduleEntry activate_uniform(SensorField& field, const Cover& cover, int max_load) {
  if (max_load < 1) throw std::invalid_argument("activate_uniform: m must be at least 1");
  const double delta = 1.0 / max_load;
  if (detail::min_battery(field, cover) < delta - 1e-9) {
    throw std::invalid_argument("activate_uniform: cover holds a sensor below 1/m");
  }
  detail::drain_cover(field, cover, delta);
  return {cover, delta, Policy::uniform};
}

/// δ = d · (weakest member's battery); every member loses δ.
inline ScheduleEntry activate_nonuniform(SensorField& field, const Cover& cover, double decay) {
  if (!(decay > 0 && decay <= 1)) throw std::invalid_argument("activate_nonuniform: decay must lie in (0, 1]");
  const double b = detail::min_battery(field, cover);
  if (!(b > 0)) throw std::invalid_argument("activate_nonuniform: cover holds a depleted sensor");
  const double delta = decay * b;
  detail::drain_cover(field, cover, delta);
  return {cover, delta, Policy::nonuniform};
}

/// Fresh cover kept on until its batteries run out: δ = 1.
inline ScheduleEntry activate_nonpreemptive(SensorField& field, const Cover& cover) {
  if (cover.sensor_ids.empty()) throw std::invalid_argument("activate_nonpreemptive: empty cover");
  for (int id : cover.sensor_ids) {
    if (field.battery(id) < 1.0 - 1e-9) throw std::invalid_argument("activate_nonpreemptive: cover holds a used sensor");
  }
  const double delta = detail::min_battery(field, cover);
  detail::drain_cover(field, cover, delta);
  return {cover, delta, Policy::nonpreemptive};
}

/// Smallest battery a sensor needs to join a cover under `policy`.
inline double policy_floor(Policy policy, int max_load) {
  switch (policy) {
    case Policy::uniform: return 1.0 / max_load;
    case Policy::nonpreemptive: return 1.0;
    case Policy::nonuniform: return kDepleted;
  }
  return kDepleted;
}

/// Round-robin over the family: each visit looks for a cover on the next
/// grid (for LP, the whole path decomposition) and activates it. Stops once
/// every grid in a row came back empty.
inline ScheduleResult grid_based_lifetime(SensorField& field, const GridFamily& family, Algorithm algorithm,
                                          Policy policy, const ScheduleParams& params) {
  if (algorithm == Algorithm::lp && policy != Policy::nonuniform) {
    throw std::invalid_argument("grid_based_lifetime: the LP algorithm schedules non-uniformly only");
  }
  if (policy == Policy::uniform && params.max_load < 1) throw std::invalid_argument("grid_based_lifetime: m must be at least 1");
  ScheduleResult result;
  result.policy = policy;
  result.algorithm = to_string(algorithm);
  const auto n_grids = family.grids.size();
  result.per_grid.assign(n_grids, {});
  if (n_grids == 0) return result;

  const double w = strip_half_width(params.epsilon, params.kappa, params.strip_mode);
  CoverSearch search(field);
  std::vector<GridContext> contexts;
  if (algorithm != Algorithm::lp) {
    for (const auto& g : family.grids) contexts.push_back(search.make_grid_context(g, w));
  }
  const double floor = policy_floor(policy, params.max_load);

  auto activate = [&](Cover cover, std::size_t gi) {
    cover.grid_index = static_cast<int>(gi);
    cover.epsilon = params.epsilon;
    cover.algorithm = result.algorithm;
    ScheduleEntry e;
    switch (policy) {
      case Policy::uniform: e = activate_uniform(field, cover, params.max_load); break;
      case Policy::nonuniform: e = activate_nonuniform(field, cover, params.decay); break;
      case Policy::nonpreemptive: e = activate_nonpreemptive(field, cover); break;
    }
    result.per_grid[gi].covers += 1;
    result.per_grid[gi].lifetime += e.delta;
    result.lifetime += e.delta;
    result.entries.push_back(std::move(e));
  };

  std::size_t idle = 0, gi = 0;
  while (idle < n_grids) {
    bool found = false;
    if (algorithm == Algorithm::lp) {
      const auto net = build_flow_network(search, family.grids[gi], w, kLpBatteryFloor);
      const auto sol = solve_flow_lp(net);
      if (sol.status == LPStatus::optimal && sol.objective > 1e-7) {
        const auto dec = decompose_paths(net, sol);
        for (const auto& path : dec.paths) {
          Cover c;
          c.sensor_ids = path.sensor_ids;
          if (c.sensor_ids.empty()) continue;
          const double delta = std::min(path.delta, detail::min_battery(field, c));
          if (delta <= kDepleted) continue;
          c.b_max = delta;
          c.grid_index = static_cast<int>(gi);
          c.epsilon = params.epsilon;
          c.algorithm = result.algorithm;
          detail::drain_cover(field, c, delta);
          result.per_grid[gi].covers += 1;
          result.per_grid[gi].lifetime += delta;
          result.lifetime += delta;
          result.entries.push_back({std::move(c), delta, Policy::nonuniform});
          found = true;
        }
      }
    } else {
      std::optional<Cover> cover;
      if (algorithm == Algorithm::minmax) {
        cover = minmax_cover(search, contexts[gi], floor);
      } else if (auto tc = bfs_cover(search, contexts[gi], floor)) {
        cover = std::move(tc->cover);
      }
      if (cover) {
        activate(std::move(*cover), gi);
        found = true;
      }
    }
    idle = found ? 0 : idle + 1;
    gi = (gi + 1) % n_grids;
    if (gi == 0) ++result.passes;
  }
  return result;
}

// Schedule CSV: entry_index,grid_index,algorithm,policy,delta,cover_size,sensor_ids

inline const char* kScheduleCsvHeader = "entry_index,grid_index,algorithm,policy,delta,cover_size,sensor_ids";

inline void write_schedule_csv(std::ostream& os, const ScheduleResult& result) {
  os << kScheduleCsvHeader << '\n';
  for (std::size_t i = 0; i < result.entries.size(); ++i) {
    const auto& e = result.entries[i];
    os << i << ',' << e.cover.grid_index << ',' << e.cover.algorithm << ',' << to_string(e.policy) << ','
       << format_g9(e.delta) << ',' << e.cover.sensor_ids.size() << ',';
    for (std::size_t k = 0; k < e.cover.sensor_ids.size(); ++k) os << (k ? ";" : "") << e.cover.sensor_ids[k];
    os << '\n';
  }
}

inline std::vector<ScheduleEntry> read_schedule_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kScheduleCsvHeader) throw std::runtime_error("schedule csv: bad header");
  std::vector<ScheduleEntry> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    if (cols.size() == 6) cols.emplace_back();
    if (cols.size() != 7) throw std::runtime_error("schedule csv: malformed row '" + line + "'");
    ScheduleEntry e;
    e.cover.grid_index = std::stoi(cols[1]);
    e.cover.algorithm = cols[2];
    e.policy = parse_policy(cols[3]);
    e.delta = std::stod(cols[4]);
    std::stringstream ids(cols[6]);
    while (std::getline(ids, cell, ';')) {
      if (!cell.empty()) e.cover.sensor_ids.push_back(std::stoi(cell));
    }
    if (e.cover.sensor_ids.size() != std::stoul(cols[5])) throw std::runtime_error("schedule csv: cover_size mismatch");
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace kweak
