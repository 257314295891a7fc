// kweak: command-line front end for field generation, grids, covers,
// schedules, verification and seeded sweeps.
//
// Exit codes: 0 success, 1 verification failure, 2 bad input.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kweak/barrier_covers.hpp"
#include "kweak/field.hpp"
#include "kweak/flow_lp.hpp"
#include "kweak/grids.hpp"
#include "kweak/harness.hpp"
#include "kweak/random_seeds.hpp"
#include "kweak/scheduling.hpp"
#include "kweak/simplex.hpp"
#include "kweak/verification.hpp"

namespace {

struct BadInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Writes to the --out file, or stdout when none was given.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw BadInput("cannot write '" + path + "'");
    }
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

kweak::SensorField load_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadInput("cannot open field '" + path + "'");
  return kweak::read_field(in);
}

struct GridOptions {
  std::string kind = "square";
  double kappa = 10.0;
  double eps = 0.0;
  double granularity = 2.0;
  std::string strip_mode = "relative";

  kweak::StripMode mode() const {
    if (strip_mode == "relative") return kweak::StripMode::relative;
    if (strip_mode == "absolute") return kweak::StripMode::absolute;
    throw BadInput("strip mode must be relative or absolute");
  }
  double half_width() const { return kweak::strip_half_width(eps, kappa, mode()); }
  kweak::GridFamily family(double side) const {
    if (!(kappa > 1)) throw BadInput("kappa must exceed 1");
    return kweak::shift_family(kweak::parse_grid_kind(kind), side, kappa, granularity + 2.0 * half_width());
  }
};

void add_grid_options(CLI::App* cmd, GridOptions& g) {
  cmd->add_option("--kind", g.kind, "square or hex")->check(CLI::IsMember({"square", "hex", "hexagonal"}));
  cmd->add_option("--kappa", g.kappa, "trap diameter");
  cmd->add_option("--eps", g.eps, "strip width parameter");
  cmd->add_option("--granularity", g.granularity, "shift lattice spacing g");
  cmd->add_option("--strip-mode", g.strip_mode, "relative (width eps*kappa) or absolute (width eps)");
}

void dump_lp(const std::string& path, const kweak::FlowNetwork& net) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw BadInput("cannot write '" + path + "'");
  kweak::write_lp_text(out, kweak::to_standard_lp(net));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kappa-weak coverage sleep scheduling"};
  app.require_subcommand(1);

  std::string out_path, config_path, lp_dump;
  std::optional<std::uint64_t> seed;

  // gen-field
  double L = 30.0, intensity = 2.0;
  auto* gen = app.add_subcommand("gen-field", "Poisson sensor field");
  gen->add_option("--L", L, "region side");
  gen->add_option("--intensity", intensity, "sensors per unit area");
  gen->add_option("--seed", seed, "field seed");
  gen->add_option("--out", out_path, "output file (default stdout)");

  // grid
  GridOptions gopt;
  int grid_index = 0;
  bool list_family = false;
  auto* grid_cmd = app.add_subcommand("grid", "Shifted grid of a family");
  add_grid_options(grid_cmd, gopt);
  grid_cmd->add_option("--L", L, "region side");
  grid_cmd->add_option("--index", grid_index, "grid index within the shift family");
  grid_cmd->add_flag("--summary", list_family, "print family offsets and edge lengths as JSON instead");
  grid_cmd->add_option("--out", out_path, "output file (default stdout)");

  // cover
  std::string field_path, alg = "bfs", policy = "nonuniform";
  auto* cover_cmd = app.add_subcommand("cover", "One cover on one grid");
  add_grid_options(cover_cmd, gopt);
  cover_cmd->add_option("--field", field_path, "field file")->required();
  cover_cmd->add_option("--alg", alg, "minmax, bfs or lp");
  cover_cmd->add_option("--index", grid_index, "grid index within the shift family");
  cover_cmd->add_option("--lp-dump", lp_dump, "write the LP in text form");
  cover_cmd->add_option("--out", out_path, "output file (default stdout)");

  // schedule
  int max_load = 2, seed_count = 4;
  double decay = 1.0, cell = kweak::kDefaultCellSize;
  std::string seed_reach = "hops";
  auto* sched = app.add_subcommand("schedule", "Lifetime schedule over a grid family");
  add_grid_options(sched, gopt);
  sched->add_option("--field", field_path, "field file")->required();
  sched->add_option("--alg", alg, "minmax, bfs, lp or random_seeds");
  sched->add_option("--policy", policy, "uniform, nonuniform or nonpreemptive");
  sched->add_option("--m", max_load, "max load for the uniform policy");
  sched->add_option("--decay", decay, "decay coefficient for the non-uniform policy");
  sched->add_option("--seed", seed, "random_seeds seed");
  sched->add_option("--seed-count", seed_count, "random_seeds k");
  sched->add_option("--seed-reach", seed_reach, "hops or euclidean");
  sched->add_option("--cell", cell, "raster cell size for random_seeds checks");
  sched->add_option("--lp-dump", lp_dump, "write the first grid's LP in text form");
  sched->add_option("--out", out_path, "schedule CSV (default stdout)");

  // verify
  std::string schedule_path, cover_path;
  double verify_kappa = 10.0, verify_eps = 0.0;
  auto* verify = app.add_subcommand("verify", "Raster check of covers; exit 1 if any fails");
  verify->add_option("--field", field_path, "field file")->required();
  auto* vs = verify->add_option("--schedule", schedule_path, "schedule CSV");
  auto* vc = verify->add_option("--cover", cover_path, "cover dump");
  vs->excludes(vc);
  verify->add_option("--kappa", verify_kappa, "trap diameter");
  verify->add_option("--eps", verify_eps, "hole widening allowed, relative to kappa");
  verify->add_option("--cell", cell, "raster cell size");
  verify->add_option("--out", out_path, "JSON report (default stdout)");

  // sweep
  std::string aggregate_path;
  int workers = 0;
  auto* sweep = app.add_subcommand("sweep", "Seeded parameter sweep");
  sweep->add_option("--config", config_path, "JSON config")->required();
  sweep->add_option("--seed", seed, "override base_seed");
  sweep->add_option("--workers", workers, "override worker count");
  sweep->add_option("--out", out_path, "raw rows CSV (default stdout)");
  sweep->add_option("--aggregate", aggregate_path, "per-coordinate means CSV");

  // report
  std::string in_path;
  auto* report = app.add_subcommand("report", "Aggregate a sweep CSV");
  report->add_option("--in", in_path, "sweep CSV")->required();
  report->add_option("--out", out_path, "aggregate CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      const auto field = kweak::generate_field(L, intensity, seed.value_or(1));
      Sink sink(out_path);
      kweak::write_field(sink.get(), field);
      return 0;
    }

    if (*grid_cmd) {
      const auto fam = gopt.family(L);
      Sink sink(out_path);
      if (list_family) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& g : fam.grids) {
          j.push_back({{"offset", {g.offset.x, g.offset.y}},
                       {"segments", g.segments.size()},
                       {"total_edge_length", kweak::total_edge_length(g)},
                       {"tiling_edge_length", kweak::tiling_edge_length(g)}});
        }
        sink.get() << j.dump(2) << '\n';
        return 0;
      }
      if (grid_index < 0 || grid_index >= static_cast<int>(fam.grids.size())) {
        throw BadInput("grid index out of range (family has " + std::to_string(fam.grids.size()) + " grids)");
      }
      kweak::write_grid(sink.get(), fam.grids[static_cast<std::size_t>(grid_index)]);
      return 0;
    }

    if (*cover_cmd) {
      const auto field = load_field(field_path);
      const auto fam = gopt.family(field.region_side());
      if (grid_index < 0 || grid_index >= static_cast<int>(fam.grids.size())) throw BadInput("grid index out of range");
      const auto& grid = fam.grids[static_cast<std::size_t>(grid_index)];
      kweak::CoverSearch search(field);
      const double w = gopt.half_width();
      Sink sink(out_path);
      auto emit = [&](kweak::Cover c) {
        c.grid_index = grid_index;
        c.epsilon = gopt.eps;
        kweak::write_cover(sink.get(), c);
      };
      const auto a = kweak::parse_algorithm(alg);
      if (a == kweak::Algorithm::lp) {
        const auto net = kweak::build_flow_network(search, grid, w);
        dump_lp(lp_dump, net);
        const auto sol = kweak::solve_flow_lp(net);
        for (const auto& p : kweak::decompose_paths(net, sol).paths) {
          kweak::Cover c;
          c.sensor_ids = p.sensor_ids;
          c.algorithm = "lp";
          c.b_max = p.delta;
          emit(c);
        }
        return 0;
      }
      const auto gc = search.make_grid_context(grid, w);
      std::optional<kweak::Cover> c;
      if (a == kweak::Algorithm::minmax) {
        c = kweak::minmax_cover(search, gc);
      } else if (auto tc = kweak::bfs_cover(search, gc)) {
        c = tc->cover;
      }
      if (!c) {
        std::cerr << "no cover on grid " << grid_index << '\n';
        return 1;
      }
      emit(*c);
      return 0;
    }

    if (*sched) {
      auto field = load_field(field_path);
      kweak::ScheduleResult r;
      if (alg == "random_seeds") {
        kweak::SeedParams p;
        p.k = seed_count;
        p.kappa = gopt.kappa;
        p.seed = seed.value_or(1);
        if (seed_reach != "hops" && seed_reach != "euclidean") throw BadInput("seed reach must be hops or euclidean");
        p.reach = seed_reach == "euclidean" ? kweak::SeedReach::euclidean : kweak::SeedReach::hops;
        r = kweak::random_seeds_lifetime(field, p, gopt.eps, decay, cell);
      } else {
        const auto fam = gopt.family(field.region_side());
        const auto a = kweak::parse_algorithm(alg);
        if (a == kweak::Algorithm::lp && !lp_dump.empty() && !fam.grids.empty()) {
          kweak::CoverSearch search(field);
          dump_lp(lp_dump, kweak::build_flow_network(search, fam.grids.front(), gopt.half_width(), kweak::kLpBatteryFloor));
        }
        kweak::ScheduleParams sp;
        sp.kappa = gopt.kappa;
        sp.epsilon = gopt.eps;
        sp.strip_mode = gopt.mode();
        sp.max_load = max_load;
        sp.decay = decay;
        r = kweak::grid_based_lifetime(field, fam, a, kweak::parse_policy(policy), sp);
      }
      Sink sink(out_path);
      kweak::write_schedule_csv(sink.get(), r);
      std::cerr << "lifetime " << kweak::format_g9(r.lifetime) << " over " << r.entries.size() << " covers\n";
      return 0;
    }

    if (*verify) {
      const auto field = load_field(field_path);
      std::vector<std::vector<int>> covers;
      if (!schedule_path.empty()) {
        std::ifstream in(schedule_path);
        if (!in) throw BadInput("cannot open schedule '" + schedule_path + "'");
        for (auto& e : kweak::read_schedule_csv(in)) covers.push_back(std::move(e.cover.sensor_ids));
      } else if (!cover_path.empty()) {
        std::ifstream in(cover_path);
        if (!in) throw BadInput("cannot open cover dump '" + cover_path + "'");
        std::string line;
        while (std::getline(in, line)) {
          if (!line.empty()) covers.push_back(kweak::parse_cover_line(line).sensor_ids);
        }
      } else {
        throw BadInput("verify needs --schedule or --cover");
      }
      for (const auto& ids : covers) {
        for (int id : ids) {
          if (id < 0 || static_cast<std::size_t>(id) >= field.size()) throw BadInput("sensor id " + std::to_string(id) + " not in field");
        }
      }
      nlohmann::json j;
      j["entries"] = nlohmann::json::array();
      bool all_pass = true;
      double worst = 0.0;
      for (const auto& ids : covers) {
        const auto v = kweak::verify_kappa_weak(field, ids, verify_kappa, verify_eps, cell);
        all_pass = all_pass && v.pass;
        worst = std::max(worst, v.report.max_diameter);
        j["entries"].push_back(kweak::to_json(v));
      }
      j["pass"] = all_pass;
      j["covers"] = covers.size();
      j["max_diameter"] = worst;
      j["threshold"] = kweak::kappa_weak_threshold(verify_kappa, verify_eps, cell);
      Sink sink(out_path);
      sink.get() << j.dump(2) << '\n';
      return all_pass ? 0 : 1;
    }

    if (*sweep) {
      auto config = kweak::load_config(config_path);
      if (seed) config.base_seed = *seed;
      if (workers > 0) config.workers = workers;
      const auto rows = kweak::run_sweep(config);
      {
        Sink sink(out_path);
        kweak::write_sweep_csv(sink.get(), rows);
      }
      if (!aggregate_path.empty()) {
        std::ofstream agg(aggregate_path);
        if (!agg) throw BadInput("cannot write '" + aggregate_path + "'");
        kweak::write_aggregate_csv(agg, kweak::aggregate(rows));
      }
      return 0;
    }

    if (*report) {
      std::ifstream in(in_path);
      if (!in) throw BadInput("cannot open '" + in_path + "'");
      const auto rows = kweak::read_sweep_csv(in);
      Sink sink(out_path);
      kweak::write_aggregate_csv(sink.get(), kweak::aggregate(rows));
      return 0;
    }
  } catch (const BadInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
