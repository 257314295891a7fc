#pragma once

// Location-free covers: breadth-first searches from random seeds switch off
// the sensors they sweep and keep the sensors on their frontier awake.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "kweak/barrier_covers.hpp"
#include "kweak/field.hpp"
#include "kweak/geometry.hpp"
#include "kweak/rng.hpp"
#include "kweak/scheduling.hpp"
#include "kweak/verification.hpp"

namespace kweak {

enum class SeedLabel : std::uint8_t { unlabeled, boundary, deactivated };

/// How a search decides it has gone far enough.
enum class SeedReach { hops, euclidean };

struct SeedRoundState {
  std::vector<SeedLabel> labels;
  std::vector<int> seeds;
  int hop_limit = 0;
};

struct SeedParams {
  int k = 1;
  double kappa = 10.0;
  std::uint64_t seed = 0;
  SeedReach reach = SeedReach::hops;
  int hop_limit = -1;            ///< -1: ⌊κ/4⌋
  double euclidean_radius = -1;  ///< -1: κ/2

  int effective_hop_limit() const { return hop_limit >= 0 ? hop_limit : std::max(1, static_cast<int>(std::floor(kappa / 4.0))); }
  double effective_radius() const { return euclidean_radius > 0 ? euclidean_radius : kappa / 2.0; }
};

/// Distinct seeds drawn uniformly among live sensors (partial Fisher-Yates).
inline std::vector<int> pick_seeds(const SensorField& field, int k, std::uint64_t seed) {
  std::vector<int> live;
  for (const auto& s : field.sensors())
    if (field.alive(s.id)) live.push_back(s.id);
  Rng rng(seed);
  const auto take = std::min(live.size(), static_cast<std::size_t>(std::max(k, 0)));
  for (std::size_t i = 0; i < take; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_index(rng, live.size() - i));
    std::swap(live[i], live[j]);
  }
  live.resize(take);
  return live;
}

/// Lockstep searches from all seeds over live sensors. A sensor claimed by
/// two seeds in the same layer, reached at the hop limit (or beyond the
/// radius), or reached by a second seed after the first one swept it, turns
/// Boundary. Boundary sensors stop the search.
inline SeedRoundState random_seeds_round(const SensorField& field, const AdjacencyGraph& graph, const SeedParams& params) {
  if (params.k < 1) throw std::invalid_argument("random_seeds: k must be at least 1");
  const auto n = field.size();
  SeedRoundState st;
  st.labels.assign(n, SeedLabel::unlabeled);
  st.hop_limit = params.effective_hop_limit();
  st.seeds = pick_seeds(field, params.k, params.seed);
  std::vector<int> owner(n, -1), claim(n, -1);
  std::vector<int> frontier;
  for (std::size_t s = 0; s < st.seeds.size(); ++s) {
    const int id = st.seeds[s];
    owner[static_cast<std::size_t>(id)] = static_cast<int>(s);
    st.labels[static_cast<std::size_t>(id)] = SeedLabel::deactivated;
    frontier.push_back(id);
  }
  const double radius = params.effective_radius();
  std::vector<int> claimed;
  for (int layer = 1; !frontier.empty(); ++layer) {
    claimed.clear();
    std::vector<char> collided(n, 0);
    for (int u : frontier) {
      const int o = owner[static_cast<std::size_t>(u)];
      for (int v : graph.neighbors[static_cast<std::size_t>(u)]) {
        const auto vi = static_cast<std::size_t>(v);
        if (!field.alive(v)) continue;
        if (st.labels[vi] == SeedLabel::boundary) continue;
        if (st.labels[vi] == SeedLabel::deactivated) {
          if (owner[vi] != o) st.labels[vi] = SeedLabel::boundary;
          continue;
        }
        if (claim[vi] < 0) {
          claim[vi] = o;
          claimed.push_back(v);
        } else if (claim[vi] != o) {
          collided[vi] = 1;
        }
      }
    }
    std::sort(claimed.begin(), claimed.end());
    frontier.clear();
    for (int v : claimed) {
      const auto vi = static_cast<std::size_t>(v);
      const int o = claim[vi];
      claim[vi] = -1;
      bool stop = collided[vi] != 0;
      if (params.reach == SeedReach::hops) {
        stop = stop || layer >= st.hop_limit;
      } else {
        stop = stop || distance(field[v].pos, field[st.seeds[static_cast<std::size_t>(o)]].pos) >= radius;
      }
      if (stop) {
        st.labels[vi] = SeedLabel::boundary;
      } else {
        st.labels[vi] = SeedLabel::deactivated;
        owner[vi] = o;
        frontier.push_back(v);
      }
    }
  }
  return st;
}

/// Boundary sensors plus every live sensor no search reached.
inline Cover cover_from_round(const SensorField& field, const SeedRoundState& st) {
  Cover c;
  c.algorithm = "random_seeds";
  double b = 1.0;
  for (std::size_t id = 0; id < st.labels.size(); ++id) {
    if (!field.alive(static_cast<int>(id)) || st.labels[id] == SeedLabel::deactivated) continue;
    c.sensor_ids.push_back(static_cast<int>(id));
    b = std::min(b, field.sensors()[id].battery);
  }
  c.b_max = c.sensor_ids.empty() ? 0.0 : b;
  return c;
}

inline Cover random_seeds_cover(const SensorField& field, int k, double kappa, std::uint64_t seed) {
  SeedParams p;
  p.k = k;
  p.kappa = kappa;
  p.seed = seed;
  const auto graph = build_adjacency_graph(field.disks());
  return cover_from_round(field, random_seeds_round(field, graph, p));
}

/// Rounds of random-seed covers, each activated non-uniformly, until a
/// round's cover fails the verifier or nothing is left to switch off.
inline ScheduleResult random_seeds_lifetime(SensorField& field, const SeedParams& base, double epsilon, double decay,
                                            double cell_size = kDefaultCellSize, int max_rounds = 100000) {
  ScheduleResult result;
  result.policy = Policy::nonuniform;
  result.algorithm = "random_seeds";
  const auto graph = build_adjacency_graph(field.disks());
  for (int round = 0; round < max_rounds; ++round) {
    SeedParams p = base;
    p.seed = hash_combine(base.seed, static_cast<std::uint64_t>(round));
    Cover c = cover_from_round(field, random_seeds_round(field, graph, p));
    if (c.sensor_ids.empty()) break;
    if (!verify_kappa_weak(field, c.sensor_ids, base.kappa, epsilon, cell_size).pass) break;
    c.epsilon = epsilon;
    auto e = activate_nonuniform(field, c, decay);
    result.lifetime += e.delta;
    result.entries.push_back(std::move(e));
    ++result.passes;
  }
  return result;
}

}  // namespace kweak
