#pragma once

// Seeded parameter sweeps: one job per (intensity, trial) field, every
// configured algorithm/policy/grid run on an independent copy of that field,
// every activated cover re-checked by the raster verifier.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "kweak/barrier_covers.hpp"
#include "kweak/field.hpp"
#include "kweak/grids.hpp"
#include "kweak/random_seeds.hpp"
#include "kweak/rng.hpp"
#include "kweak/scheduling.hpp"
#include "kweak/verification.hpp"

namespace kweak {

struct ExperimentConfig {
  double L = 30.0;
  std::vector<double> intensities{2.0};
  std::vector<double> kappas{10.0};
  std::vector<double> epsilons{0.0, 0.1, 0.2, 0.3};
  std::vector<std::string> algorithms{"minmax", "bfs", "lp"};
  std::vector<std::string> policies{"uniform", "nonuniform"};
  std::vector<std::string> grid_kinds{"square", "hex"};
  int trials = 20;
  std::uint64_t base_seed = 1;
  double granularity = 2.0;
  double decay = 1.0;
  int max_load = 2;
  double cell_size = kDefaultCellSize;
  int workers = 1;
  bool record_runtime = false;
  std::string strip_mode = "relative";
  int seed_count = 4;  ///< k for random_seeds
  std::string seed_reach = "hops";

  void validate() const {
    auto need = [](bool ok, const char* what) {
      if (!ok) throw std::invalid_argument(std::string("config: ") + what);
    };
    need(L > 0, "L must be positive");
    need(!intensities.empty() && !kappas.empty() && !epsilons.empty(), "intensities, kappas and epsilons must be nonempty");
    need(!algorithms.empty() && !policies.empty() && !grid_kinds.empty(), "algorithms, policies and grid_kinds must be nonempty");
    need(trials >= 1, "trials must be at least 1");
    need(granularity > 0, "granularity must be positive");
    need(decay > 0 && decay <= 1, "decay must lie in (0, 1]");
    need(max_load >= 1, "max_load must be at least 1");
    need(cell_size > 0, "cell_size must be positive");
    need(workers >= 1, "workers must be at least 1");
    need(seed_count >= 1, "seed_count must be at least 1");
    need(strip_mode == "relative" || strip_mode == "absolute", "strip_mode must be relative or absolute");
    need(seed_reach == "hops" || seed_reach == "euclidean", "seed_reach must be hops or euclidean");
    for (double v : intensities) need(v > 0, "intensities must be positive");
    for (double v : kappas) need(v > 1, "kappas must exceed 1");
    for (double v : kappas) need(cell_size <= v / 20.0 + 1e-12, "cell_size must not exceed kappa/20");
    for (double v : epsilons) need(v >= 0, "epsilons must be nonnegative");
    for (const auto& a : algorithms)
      if (a != "random_seeds") parse_algorithm(a);
    for (const auto& p : policies) parse_policy(p);
    for (const auto& g : grid_kinds) parse_grid_kind(g);
  }
};

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected an object");
  ExperimentConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "L") c.L = value.get<double>();
    else if (key == "intensities") c.intensities = value.get<std::vector<double>>();
    else if (key == "kappas") c.kappas = value.get<std::vector<double>>();
    else if (key == "epsilons") c.epsilons = value.get<std::vector<double>>();
    else if (key == "algorithms") c.algorithms = value.get<std::vector<std::string>>();
    else if (key == "policies") c.policies = value.get<std::vector<std::string>>();
    else if (key == "grid_kinds") c.grid_kinds = value.get<std::vector<std::string>>();
    else if (key == "trials") c.trials = value.get<int>();
    else if (key == "base_seed") c.base_seed = value.get<std::uint64_t>();
    else if (key == "granularity") c.granularity = value.get<double>();
    else if (key == "decay") c.decay = value.get<double>();
    else if (key == "max_load") c.max_load = value.get<int>();
    else if (key == "cell_size") c.cell_size = value.get<double>();
    else if (key == "workers") c.workers = value.get<int>();
    else if (key == "record_runtime") c.record_runtime = value.get<bool>();
    else if (key == "strip_mode") c.strip_mode = value.get<std::string>();
    else if (key == "seed_count") c.seed_count = value.get<int>();
    else if (key == "seed_reach") c.seed_reach = value.get<std::string>();
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return config_from_json(j);
}

struct SweepRow {
  double intensity = 0.0;
  double kappa = 0.0;
  double epsilon = 0.0;
  std::string grid;
  std::string algorithm;
  std::string policy;
  int trial = 0;
  std::uint64_t seed = 0;
  double lifetime = 0.0;
  double upper_bound = 0.0;
  bool verifier_pass = false;
  double max_hole_diameter = 0.0;
  std::optional<double> runtime_ms;
  std::string error;  ///< nonempty when the run threw
  std::size_t covers = 0;
};

/// Field seed shared by every algorithm in a trial so they see the same field.
inline std::uint64_t trial_seed(std::uint64_t base_seed, double L, double intensity, int trial) {
  std::uint64_t h = hash_combine(base_seed, L);
  h = hash_combine(h, intensity);
  return hash_combine(h, static_cast<std::uint64_t>(trial));
}

inline double family_g_eff(const ExperimentConfig& c, double kappa, double epsilon) {
  const auto mode = c.strip_mode == "absolute" ? StripMode::absolute : StripMode::relative;
  return c.granularity + 2.0 * strip_half_width(epsilon, kappa, mode);
}

namespace detail {

struct RunSpec {
  double kappa, epsilon;
  std::string grid, algorithm, policy;
  const GridFamily* family;  ///< null for random_seeds
};

/// Verifies every entry's cover on its own.
inline void verify_entries(const SensorField& field, const ScheduleResult& r, double kappa, double epsilon,
                           double cell_size, SweepRow& row) {
  row.verifier_pass = true;
  row.max_hole_diameter = 0.0;
  for (const auto& e : r.entries) {
    const auto v = verify_kappa_weak(field, e.cover.sensor_ids, kappa, epsilon, cell_size);
    row.verifier_pass = row.verifier_pass && v.pass;
    row.max_hole_diameter = std::max(row.max_hole_diameter, v.report.max_diameter);
  }
  row.covers = r.entries.size();
}

}  // namespace detail

/// Raw rows, sorted by coordinates in config order, then trial.
inline std::vector<SweepRow> run_sweep(const ExperimentConfig& config) {
  config.validate();
  const auto mode = config.strip_mode == "absolute" ? StripMode::absolute : StripMode::relative;

  // Grid families are field-independent; build each once.
  std::map<std::tuple<std::string, double, double>, GridFamily> families;
  for (const auto& gk : config.grid_kinds)
    for (double kappa : config.kappas)
      for (double eps : config.epsilons)
        families.emplace(std::make_tuple(gk, kappa, eps),
                         shift_family(parse_grid_kind(gk), config.L, kappa, family_g_eff(config, kappa, eps)));

  std::vector<detail::RunSpec> specs;
  for (double kappa : config.kappas) {
    for (double eps : config.epsilons) {
      for (const auto& gk : config.grid_kinds) {
        for (const auto& alg : config.algorithms) {
          if (alg == "random_seeds") continue;
          for (const auto& pol : config.policies) {
            if (alg == "lp" && (pol != "nonuniform" || gk != "square")) continue;
            specs.push_back({kappa, eps, gk, alg, pol, &families.at({gk, kappa, eps})});
          }
        }
      }
      if (std::find(config.algorithms.begin(), config.algorithms.end(), "random_seeds") != config.algorithms.end()) {
        specs.push_back({kappa, eps, "none", "random_seeds", "nonuniform", nullptr});
      }
    }
  }

  struct Job {
    double intensity;
    int trial;
  };
  std::vector<Job> jobs;
  for (double intensity : config.intensities)
    for (int t = 0; t < config.trials; ++t) jobs.push_back({intensity, t});

  std::vector<std::vector<SweepRow>> out(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      const auto [intensity, trial] = jobs[j];
      const std::uint64_t seed = trial_seed(config.base_seed, config.L, intensity, trial);
      const SensorField base = generate_field(config.L, intensity, seed);
      const int depth = region_depth(base).d_R;
      for (const auto& spec : specs) {
        SweepRow row;
        row.intensity = intensity;
        row.kappa = spec.kappa;
        row.epsilon = spec.epsilon;
        row.grid = spec.grid;
        row.algorithm = spec.algorithm;
        row.policy = spec.policy;
        row.trial = trial;
        row.seed = seed;
        row.upper_bound = spec.kappa * depth;
        const auto t0 = std::chrono::steady_clock::now();
        try {
          SensorField field = base;
          ScheduleResult r;
          if (spec.algorithm == "random_seeds") {
            SeedParams p;
            p.k = config.seed_count;
            p.kappa = spec.kappa;
            p.seed = hash_combine(seed, std::uint64_t{0x5eed});
            p.reach = config.seed_reach == "euclidean" ? SeedReach::euclidean : SeedReach::hops;
            r = random_seeds_lifetime(field, p, spec.epsilon, config.decay, config.cell_size);
          } else {
            ScheduleParams sp;
            sp.kappa = spec.kappa;
            sp.epsilon = spec.epsilon;
            sp.strip_mode = mode;
            sp.max_load = config.max_load;
            sp.decay = config.decay;
            r = grid_based_lifetime(field, *spec.family, parse_algorithm(spec.algorithm), parse_policy(spec.policy), sp);
          }
          row.lifetime = r.lifetime;
          // Holes may widen by the strip width, whatever the strip mode.
          const double eps_eff = 2.0 * strip_half_width(spec.epsilon, spec.kappa, mode) / spec.kappa;
          detail::verify_entries(base, r, spec.kappa, eps_eff, config.cell_size, row);
        } catch (const std::exception& e) {
          row.error = e.what();
          row.verifier_pass = false;
        }
        if (config.record_runtime) {
          row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        }
        out[j].push_back(std::move(row));
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_workers = std::min<int>(config.workers, static_cast<int>(jobs.size()));
  for (int i = 1; i < n_workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // Rows per job come out in run-spec order; interleave to coordinate-major order.
  std::vector<SweepRow> rows;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    for (std::size_t ii = 0; ii < config.intensities.size(); ++ii) {
      for (int t = 0; t < config.trials; ++t) {
        rows.push_back(out[ii * static_cast<std::size_t>(config.trials) + static_cast<std::size_t>(t)][s]);
      }
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [&](const SweepRow& a, const SweepRow& b) {
    auto idx = [](const std::vector<double>& v, double x) { return std::find(v.begin(), v.end(), x) - v.begin(); };
    return idx(config.intensities, a.intensity) < idx(config.intensities, b.intensity);
  });
  return rows;
}

inline const char* kSweepCsvHeader =
    "intensity,kappa,epsilon,grid,algorithm,policy,trial,seed,lifetime,upper_bound,verifier_pass,max_hole_diameter,runtime_ms";

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    os << format_g9(r.intensity) << ',' << format_g9(r.kappa) << ',' << format_g9(r.epsilon) << ',' << r.grid << ','
       << r.algorithm << ',' << r.policy << ',' << r.trial << ',' << r.seed << ',';
    if (r.error.empty()) {
      os << format_g17(r.lifetime) << ',' << format_g17(r.upper_bound) << ',' << (r.verifier_pass ? "true" : "false");
    } else {
      os << ',' << format_g17(r.upper_bound) << ",error";
    }
    os << ',' << format_g17(r.max_hole_diameter) << ',';
    if (r.runtime_ms) os << format_g9(*r.runtime_ms);
    os << '\n';
  }
}

inline std::vector<SweepRow> read_sweep_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kSweepCsvHeader) throw std::runtime_error("sweep csv: bad header");
  std::vector<SweepRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> c;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) c.push_back(cell);
    if (c.size() == 12) c.emplace_back();
    if (c.size() != 13) throw std::runtime_error("sweep csv: malformed row '" + line + "'");
    SweepRow r;
    r.intensity = std::stod(c[0]);
    r.kappa = std::stod(c[1]);
    r.epsilon = std::stod(c[2]);
    r.grid = c[3];
    r.algorithm = c[4];
    r.policy = c[5];
    r.trial = std::stoi(c[6]);
    r.seed = std::stoull(c[7]);
    r.upper_bound = std::stod(c[9]);
    if (c[10] == "error") {
      r.error = "error";
    } else {
      r.lifetime = std::stod(c[8]);
      r.verifier_pass = c[10] == "true";
    }
    r.max_hole_diameter = std::stod(c[11]);
    if (!c[12].empty()) r.runtime_ms = std::stod(c[12]);
    rows.push_back(std::move(r));
  }
  return rows;
}

struct AggregateRow {
  double intensity = 0.0, kappa = 0.0, epsilon = 0.0;
  std::string grid, algorithm, policy;
  int trials = 0;
  int errors = 0;
  double mean_lifetime = 0.0;
  double mean_upper_bound = 0.0;
  double pass_rate = 0.0;
  double max_hole_diameter = 0.0;
};

/// Per-coordinate means over trials, in first-appearance order.
inline std::vector<AggregateRow> aggregate(const std::vector<SweepRow>& rows) {
  std::vector<AggregateRow> out;
  std::map<std::tuple<double, double, double, std::string, std::string, std::string>, std::size_t> index;
  for (const auto& r : rows) {
    const auto key = std::make_tuple(r.intensity, r.kappa, r.epsilon, r.grid, r.algorithm, r.policy);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      AggregateRow a;
      a.intensity = r.intensity;
      a.kappa = r.kappa;
      a.epsilon = r.epsilon;
      a.grid = r.grid;
      a.algorithm = r.algorithm;
      a.policy = r.policy;
      out.push_back(a);
    }
    auto& a = out[it->second];
    a.trials += 1;
    a.errors += r.error.empty() ? 0 : 1;
    a.mean_lifetime += r.lifetime;
    a.mean_upper_bound += r.upper_bound;
    a.pass_rate += r.verifier_pass ? 1.0 : 0.0;
    a.max_hole_diameter = std::max(a.max_hole_diameter, r.max_hole_diameter);
  }
  for (auto& a : out) {
    a.mean_lifetime /= a.trials;
    a.mean_upper_bound /= a.trials;
    a.pass_rate /= a.trials;
  }
  return out;
}

inline const char* kAggregateCsvHeader =
    "intensity,kappa,epsilon,grid,algorithm,policy,trials,errors,mean_lifetime,mean_upper_bound,verifier_pass_rate,max_hole_diameter";

inline void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows) {
  os << kAggregateCsvHeader << '\n';
  for (const auto& a : rows) {
    os << format_g9(a.intensity) << ',' << format_g9(a.kappa) << ',' << format_g9(a.epsilon) << ',' << a.grid << ','
       << a.algorithm << ',' << a.policy << ',' << a.trials << ',' << a.errors << ',' << format_g9(a.mean_lifetime) << ','
       << format_g9(a.mean_upper_bound) << ',' << format_g9(a.pass_rate) << ',' << format_g9(a.max_hole_diameter) << '\n';
  }
}

}  // namespace kweak
