#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <sstream>

#include "kweak/grids.hpp"

using namespace kweak;
using Catch::Approx;

TEST_CASE("square grid line positions", "[grids]") {
  const double a = 10.0 / std::sqrt(2.0);
  const auto g = square_grid(30, 10, {1.0, 2.0});
  std::set<long> ys, xs;
  for (const auto& s : g.segments) {
    if (is_horizontal(s)) {
      ys.insert(std::lround(s.a.y * 1e6));
      CHECK(s.a.x == Approx(0.0));
      CHECK(s.b.x == Approx(30.0));
    } else {
      REQUIRE(is_vertical(s));
      xs.insert(std::lround(s.a.x * 1e6));
    }
  }
  std::set<long> want_y, want_x;
  for (int j = -1; 2.0 + j * a <= 30.0 + 1e-9; ++j)
    if (2.0 + j * a >= 0) want_y.insert(std::lround((2.0 + j * a) * 1e6));
  for (int i = -1; 1.0 + i * a <= 30.0 + 1e-9; ++i)
    if (1.0 + i * a >= 0) want_x.insert(std::lround((1.0 + i * a) * 1e6));
  CHECK(ys == want_y);
  CHECK(xs == want_x);
}

TEST_CASE("hex grid segments", "[grids]") {
  const auto g = hex_grid(30, 10, {0, 0});
  REQUIRE_FALSE(g.segments.empty());
  std::set<std::tuple<long, long, long, long>> seen;
  for (const auto& s : g.segments) {
    CHECK(s.length() <= 5.0 + 1e-9);
    for (Point p : {s.a, s.b}) {
      CHECK(p.x >= -1e-9);
      CHECK(p.x <= 30 + 1e-9);
      CHECK(p.y >= -1e-9);
      CHECK(p.y <= 30 + 1e-9);
    }
    auto key = [](Point p) { return std::make_pair(std::lround(p.x * 1e6), std::lround(p.y * 1e6)); };
    auto ka = key(s.a), kb = key(s.b);
    if (kb < ka) std::swap(ka, kb);
    CHECK(seen.insert({ka.first, ka.second, kb.first, kb.second}).second);
  }
  // Interior edges have the full side length.
  int full = 0;
  for (const auto& s : g.segments) full += std::abs(s.length() - 5.0) < 1e-9 ? 1 : 0;
  CHECK(full > static_cast<int>(g.segments.size()) / 2);
}

TEST_CASE("tile edge length near the closed forms", "[grids]") {
  const double L = 50, kappa = 10;
  const double sq_closed = 4.0 * std::sqrt(2.0) * L * L / kappa;
  const double hex_closed = 8.0 / std::sqrt(3.0) * L * L / kappa;
  CHECK(square_tel_closed_form(L, kappa) == Approx(1414.2136).margin(1e-4));
  CHECK(hex_tel_closed_form(L, kappa) == Approx(1154.70).margin(1e-2));
  const double sq = tiling_edge_length(square_grid(L, kappa, {0, 0}));
  const double hx = tiling_edge_length(hex_grid(L, kappa, {0, 0}));
  CHECK(std::abs(sq - sq_closed) <= 4.0 * kappa / std::sqrt(2.0));
  CHECK(std::abs(hx - hex_closed) <= 6.0 * kappa / 2.0);
  CHECK(hx < sq);
  CHECK(hex_closed < sq_closed);
}

TEST_CASE("hexagonal TEL beats square TEL for several regions", "[grids]") {
  for (double L : {50.0, 60.0, 75.0}) {
    const double sq = tiling_edge_length(square_grid(L, 10, {0, 0}));
    const double hx = tiling_edge_length(hex_grid(L, 10, {0, 0}));
    CHECK(hx < sq);
  }
}

TEST_CASE("square shift family sizes", "[grids]") {
  // Period κ/√2 ≈ 7.071; offsets k·g kept while k·g < period − g/2.
  CHECK(shift_offsets(GridKind::square, 10, 1.0).size() == 7);
  CHECK(shift_offsets(GridKind::square, 10, 2.0).size() == 4);
  CHECK(shift_offsets(GridKind::square, 10, 5.0).size() == 1);
  const auto offs = shift_offsets(GridKind::square, 10, 2.0);
  for (std::size_t k = 0; k < offs.size(); ++k) {
    CHECK(offs[k].x == Approx(2.0 * k));
    CHECK(offs[k].y == Approx(2.0 * k));
  }
}

TEST_CASE("hex shift family offsets are distinct modulo the period", "[grids]") {
  const auto offs = shift_offsets(GridKind::hexagonal, 10, 2.0);
  REQUIRE(offs.size() >= 2);
  CHECK(offs.front() == Point{0, 0});
  const double s = 5.0, h = std::sqrt(3.0) / 2.0 * s;
  // Hexagon vertices counter-clockwise around (s, 0).
  std::vector<Point> hexv;
  for (int k = 0; k < 6; ++k) hexv.push_back({s + s * std::cos(k * M_PI / 3.0), s * std::sin(k * M_PI / 3.0)});
  auto in_hex = [&](Point p) {
    for (int k = 0; k < 6; ++k) {
      const Point a = hexv[static_cast<std::size_t>(k)], b = hexv[static_cast<std::size_t>((k + 1) % 6)];
      if ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) < -1e-7) return false;
    }
    return true;
  };
  // d is a period vector when d = a·(1.5s, h) + b·(0, 2h) with integer a, b.
  auto congruent = [&](Point p, Point q) {
    const double a = (p.x - q.x) / (1.5 * s);
    const double b = (p.y - q.y - a * h) / (2.0 * h);
    return std::abs(a - std::round(a)) < 1e-6 && std::abs(b - std::round(b)) < 1e-6;
  };
  for (std::size_t i = 0; i < offs.size(); ++i) {
    CHECK(in_hex(offs[i]));
    for (std::size_t j = i + 1; j < offs.size(); ++j) CHECK_FALSE(congruent(offs[i], offs[j]));
  }
  // Every lattice point of the hexagon is represented.
  for (int j = -20; j <= 20; ++j) {
    for (int i = -20; i <= 20; ++i) {
      const Point p{2.0 * i + 1.0 * j, std::sqrt(3.0) * j};
      if (!in_hex(p)) continue;
      bool found = false;
      for (const auto& o : offs) found = found || congruent(p, o);
      CHECK(found);
    }
  }
  const auto fam = shift_family(GridKind::hexagonal, 20, 10, 2.0);
  CHECK(fam.grids.size() == offs.size());
  std::set<std::string> dumps;
  for (const auto& g : fam.grids) {
    std::ostringstream os;
    for (const auto& s : g.segments) os << std::lround(s.a.x * 1e4) << ',' << std::lround(s.a.y * 1e4) << ';';
    dumps.insert(os.str());
  }
  CHECK(dumps.size() == fam.grids.size());
}

TEST_CASE("granularity must be positive", "[grids]") {
  CHECK_THROWS_AS(shift_family(GridKind::square, 30, 10, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid_kind("triangle"), std::invalid_argument);
}

TEST_CASE("region boundary segments", "[grids]") {
  CHECK(lies_on_region_boundary({{0, 0}, {30, 0}}, 30));
  CHECK(lies_on_region_boundary({{30, 5}, {30, 9}}, 30));
  CHECK_FALSE(lies_on_region_boundary({{0, 5}, {30, 5}}, 30));
  CHECK(on_region_boundary({0, 7}, 30));
  CHECK_FALSE(on_region_boundary({1, 7}, 30));
}

TEST_CASE("grid dump round trip", "[grids]") {
  const auto g = hex_grid(20, 10, {1, 0.5});
  std::stringstream ss;
  write_grid(ss, g);
  const auto h = read_grid(ss, 20);
  REQUIRE(h.segments.size() == g.segments.size());
  CHECK(h.kind == GridKind::hexagonal);
  CHECK(total_edge_length(h) == Approx(total_edge_length(g)).epsilon(1e-7));
}
