#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "kweak/flow_lp.hpp"
#include "kweak/rng.hpp"
#include "kweak/simplex.hpp"

using namespace kweak;
using Catch::Approx;

namespace {

// Random layered network: horizontal arcs s -> sensors -> mu, vertical arcs
// mu -> sensors -> d, with sensors of mixed regions shared by both layers.
FlowNetwork random_network(Rng& rng, int k) {
  std::vector<int> ids(static_cast<std::size_t>(k));
  std::vector<double> batt;
  std::vector<SensorRegion> regions;
  for (int i = 0; i < k; ++i) {
    ids[static_cast<std::size_t>(i)] = 100 + i;
    batt.push_back(std::round(uniform(rng, 0.05, 1.0) * 20) / 20);
    const auto r = uniform_index(rng, 3);
    regions.push_back(r == 0 ? SensorRegion::horizontal_only : r == 1 ? SensorRegion::vertical_only : SensorRegion::mixed);
  }
  auto net = FlowNetwork::with_sensors(ids, batt, regions);
  auto has = [&](int i, Commodity c) {
    const auto r = regions[static_cast<std::size_t>(i)];
    return r == SensorRegion::mixed || (c == Commodity::horizontal ? r == SensorRegion::horizontal_only : r == SensorRegion::vertical_only);
  };
  for (Commodity c : {Commodity::horizontal, Commodity::vertical}) {
    const int entry = c == Commodity::horizontal ? net.source : net.mu;
    const int exit = c == Commodity::horizontal ? net.mu : net.sink;
    for (int i = 0; i < k; ++i) {
      if (!has(i, c)) continue;
      if (uniform01(rng) < 0.35) net.add_arc(entry, FlowNetwork::in_node(i), c);
      if (uniform01(rng) < 0.35) net.add_arc(FlowNetwork::out_node(i), exit, c);
      for (int j = 0; j < k; ++j) {
        if (j != i && has(j, c) && uniform01(rng) < 0.25) net.add_arc(FlowNetwork::out_node(i), FlowNetwork::in_node(j), c);
      }
    }
  }
  return net;
}

double source_outflow(const FlowNetwork& net, const std::vector<double>& f) {
  double t = 0.0;
  for (std::size_t a = 0; a < net.arcs.size(); ++a)
    if (net.arcs[a].tail == net.source) t += f[a];
  return t;
}

}  // namespace

TEST_CASE("standard LP layout of a hand built network", "[flow_lp]") {
  auto net = FlowNetwork::with_sensors({7, 9}, {0.5, 0.25}, {SensorRegion::horizontal_only, SensorRegion::vertical_only});
  net.add_arc(net.source, FlowNetwork::in_node(0), Commodity::horizontal);
  net.add_arc(FlowNetwork::out_node(0), net.mu, Commodity::horizontal);
  net.add_arc(net.mu, FlowNetwork::in_node(1), Commodity::vertical);
  net.add_arc(FlowNetwork::out_node(1), net.sink, Commodity::vertical);
  CHECK(net.big_m == Approx(1.75));
  CHECK(net.node_count == 7);
  CHECK(net.node_name(net.source) == "s");
  CHECK(net.node_name(FlowNetwork::out_node(1)) == "o9");

  const auto lp = to_standard_lp(net);
  REQUIRE(lp.num_vars() == 4);
  CHECK(lp.names[0] == "x_s_i7");
  CHECK(lp.names[3] == "y_o9_d");
  CHECK(lp.objective == std::vector<double>{1, 0, 0, 0});
  for (double u : lp.upper) CHECK(u == Approx(1.75));
  // consh_7, consv_9, conv_mu, throughput; then cap_7, cap_9.
  REQUIRE(lp.equalities.size() == 4);
  REQUIRE(lp.inequalities.size() == 2);
  CHECK(lp.equalities[0].name == "consh_7");
  CHECK(lp.equalities[2].name == "conv_mu");
  CHECK(lp.inequalities[1].rhs == Approx(0.25));
  CHECK(lp.inequalities[1].terms.size() == 1);
  CHECK(lp.inequalities[1].terms[0].var == 3);

  const auto sol = solve_flow_lp(net);
  REQUIRE(sol.status == LPStatus::optimal);
  CHECK(sol.objective == Approx(0.25));
  CHECK(primal_residual(lp, sol.values) < 1e-9);
  std::ostringstream os;
  write_lp_text(os, lp);
  CHECK(os.str().find("cap_9") != std::string::npos);
}

TEST_CASE("column generation matches the dense simplex", "[flow_lp]") {
  Rng rng(123);
  int nonzero = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const auto net = random_network(rng, 3 + static_cast<int>(uniform_index(rng, 8)));
    const auto lp = to_standard_lp(net);
    const auto dense = solve_lp(lp);
    const auto cg = solve_flow_lp(net);
    REQUIRE(dense.status == LPStatus::optimal);
    REQUIRE(cg.status == LPStatus::optimal);
    CHECK(cg.objective == Approx(dense.objective).margin(1e-7));
    CHECK(primal_residual(lp, cg.values) < 1e-7);
    CHECK(source_outflow(net, cg.values) == Approx(cg.objective).margin(1e-9));
    // Labels only restrict the flow.
    CHECK(cg.objective <= max_flow_oracle(net) + 1e-9);
    nonzero += cg.objective > 1e-9;
  }
  CHECK(nonzero > 30);
}

TEST_CASE("commodity labels can make the LP smaller than plain max flow", "[flow_lp]") {
  // s -h-> a -v-> d carries flow in a label-free network, but horizontal flow
  // must reach mu before it may turn vertical.
  auto net = FlowNetwork::with_sensors({0, 1}, {1.0, 1.0}, {SensorRegion::mixed, SensorRegion::horizontal_only});
  net.add_arc(net.source, FlowNetwork::in_node(0), Commodity::horizontal);
  net.add_arc(FlowNetwork::out_node(0), net.sink, Commodity::vertical);
  net.add_arc(net.source, FlowNetwork::in_node(1), Commodity::horizontal);
  const auto sol = solve_flow_lp(net);
  REQUIRE(sol.status == LPStatus::optimal);
  CHECK(sol.objective == 0.0);
  CHECK(max_flow_oracle(net) == Approx(1.0));
  CHECK(solve_lp(to_standard_lp(net)).objective == Approx(0.0).margin(1e-12));
}

TEST_CASE("max flow oracle on a textbook network", "[flow_lp]") {
  // Two parallel unit chains through mu with capacities 0.3 and 0.7 at the
  // narrowest sensors.
  auto net = FlowNetwork::with_sensors({1, 2, 3, 4}, {0.3, 1.0, 0.7, 1.0},
                                       {SensorRegion::horizontal_only, SensorRegion::vertical_only,
                                        SensorRegion::horizontal_only, SensorRegion::vertical_only});
  net.add_arc(net.source, FlowNetwork::in_node(0), Commodity::horizontal);
  net.add_arc(FlowNetwork::out_node(0), net.mu, Commodity::horizontal);
  net.add_arc(net.source, FlowNetwork::in_node(2), Commodity::horizontal);
  net.add_arc(FlowNetwork::out_node(2), net.mu, Commodity::horizontal);
  net.add_arc(net.mu, FlowNetwork::in_node(1), Commodity::vertical);
  net.add_arc(FlowNetwork::out_node(1), net.sink, Commodity::vertical);
  net.add_arc(net.mu, FlowNetwork::in_node(3), Commodity::vertical);
  net.add_arc(FlowNetwork::out_node(3), net.sink, Commodity::vertical);
  CHECK(max_flow_oracle(net) == Approx(1.0));
  const auto sol = solve_flow_lp(net);
  CHECK(sol.objective == Approx(1.0));

  std::vector<double> residual;
  const auto dec = decompose_paths(net, sol, &residual);
  CHECK(dec.total() == Approx(1.0).margin(1e-9));
  for (double r : residual) CHECK(std::abs(r) < 1e-9);
  std::multiset<long> deltas;
  for (const auto& p : dec.paths) {
    deltas.insert(std::lround(p.delta * 1000));
    CHECK(p.nodes.front() == net.source);
    CHECK(p.nodes.back() == net.sink);
    CHECK(std::find(p.nodes.begin(), p.nodes.end(), net.mu) != p.nodes.end());
    CHECK(p.sensor_ids.size() == 2);
  }
  // Whatever the vertical pairing, the horizontal split is 0.3 / 0.7.
  double via_1 = 0.0;
  for (const auto& p : dec.paths)
    if (std::binary_search(p.sensor_ids.begin(), p.sensor_ids.end(), 1)) via_1 += p.delta;
  CHECK(via_1 == Approx(0.3));
  long sum = 0;
  for (long d : deltas) sum += d;
  CHECK(sum == 1000);
}

TEST_CASE("decomposition of random networks sums to the objective", "[flow_lp]") {
  Rng rng(4);
  for (int trial = 0; trial < 80; ++trial) {
    const auto net = random_network(rng, 4 + static_cast<int>(uniform_index(rng, 6)));
    const auto sol = solve_flow_lp(net);
    REQUIRE(sol.status == LPStatus::optimal);
    const auto dec = decompose_paths(net, sol);
    CHECK(dec.total() == Approx(sol.objective).margin(1e-6));
    for (const auto& p : dec.paths) {
      CHECK(p.delta > 0.0);
      CHECK(std::is_sorted(p.sensor_ids.begin(), p.sensor_ids.end()));
    }
  }
}

TEST_CASE("grid network on a real field", "[flow_lp]") {
  const auto field = generate_field(10, 2, 3);
  const auto grid = square_grid(10, 10, {1.0, 1.0});
  const auto net = build_flow_network(field, grid, 1.0);
  REQUIRE(net.sensor_count() > 0);
  for (const auto& a : net.arcs) {
    CHECK(a.tail != net.sink);
    CHECK(a.head != net.source);
    if (a.commodity == Commodity::horizontal) {
      CHECK(a.tail != net.mu);
      CHECK(a.head != net.sink);
    } else {
      CHECK(a.tail != net.source);
      CHECK(a.head != net.mu);
    }
  }
  const auto lp = to_standard_lp(net);
  const auto dense = solve_lp(lp);
  const auto cg = solve_flow_lp(net);
  REQUIRE(dense.status == LPStatus::optimal);
  CHECK(cg.objective == Approx(dense.objective).margin(1e-7));
  CHECK(cg.objective <= max_flow_oracle(net) + 1e-9);
  // Fresh batteries: the cover count is bounded by the weakest cut, which
  // cannot beat the depth of the field.
  CHECK(cg.objective <= static_cast<double>(region_depth(field).d_R) + 1e-9);
}

TEST_CASE("hex grids are rejected by the LP builder", "[flow_lp]") {
  const auto field = generate_field(10, 2, 3);
  CHECK_THROWS_AS(build_flow_network(field, hex_grid(10, 10, {0, 0}), 1.0), std::invalid_argument);
}

TEST_CASE("decomposition demands an optimal solution", "[flow_lp]") {
  auto net = FlowNetwork::with_sensors({0}, {1.0}, {SensorRegion::mixed});
  LPSolution bad;
  bad.status = LPStatus::infeasible;
  CHECK_THROWS_AS(decompose_paths(net, bad), std::invalid_argument);
}
