#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "grid.hpp"
#include "helpers.hpp"
#include "rng.hpp"

using namespace mmdp;
using testhelp::pos;

namespace {

GridMap paper_map() { return GridMap(4, 4, 200.0, 4.0); }

Position random_street_point(const GridMap& map, Rng& rng) {
  // random point along a random street, sometimes exactly at a node
  const double cell = map.cell_size();
  if (rng.bernoulli(0.3)) return map.node(rng.uniform_int(map.num_nodes()));
  if (rng.bernoulli(0.5)) {
    const int row = rng.uniform_int(map.rows());
    return map.snap(pos(rng.uniform(0.0, map.width()), row * cell));
  }
  const int col = rng.uniform_int(map.cols());
  return map.snap(pos(col * cell, rng.uniform(0.0, map.height())));
}

}  // namespace

TEST_CASE("travel time of a point to itself is zero") {
  const GridMap map = paper_map();
  CHECK(map.travel_time(pos(0, 0), pos(0, 0)) == doctest::Approx(0.0));
  CHECK(map.travel_time(pos(200, 300), pos(200, 300)) == doctest::Approx(0.0));
}

TEST_CASE("shortest path between intersections follows the streets") {
  const GridMap map = paper_map();
  // 600 m of streets at 4 m/s
  CHECK(map.travel_time(pos(0, 0), pos(400, 200)) == doctest::Approx(150.0));
}

TEST_CASE("mid-edge pairs cannot cut across blocks") {
  const GridMap map = paper_map();
  // facing points on parallel streets: must go around via an intersection
  const double d = map.distance(pos(100, 0), pos(100, 200));
  CHECK(d == doctest::Approx(400.0));
  // same street segment: straight line applies
  CHECK(map.distance(pos(50, 0), pos(150, 0)) == doctest::Approx(100.0));
}

TEST_CASE("travel time is symmetric") {
  const GridMap map = paper_map();
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const Position a = random_street_point(map, rng);
    const Position b = random_street_point(map, rng);
    CHECK(map.travel_time(a, b) == doctest::Approx(map.travel_time(b, a)).epsilon(1e-12));
  }
}

TEST_CASE("travel time is a metric") {
  const GridMap map = paper_map();
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const Position a = random_street_point(map, rng);
    const Position b = random_street_point(map, rng);
    const Position c = random_street_point(map, rng);
    const double ab = map.travel_time(a, b);
    const double bc = map.travel_time(b, c);
    const double ac = map.travel_time(a, c);
    CHECK(ab >= 0.0);
    if (same_point(a, b)) CHECK(ab == doctest::Approx(0.0));
    if (ab < 1e-9) CHECK(same_point(a, b, 1e-6));
    CHECK(ac <= ab + bc + 1e-9);
  }
}

TEST_CASE("via travel time adds the two legs and never beats the direct path") {
  const GridMap map = paper_map();
  CHECK(map.travel_time_via(pos(0, 0), pos(200, 0), pos(200, 200)) == doctest::Approx(100.0));
  SUBCASE("degenerate via points") {
    const Position a = pos(0, 200), b = pos(400, 0);
    CHECK(map.travel_time_via(a, a, b) == doctest::Approx(map.travel_time(a, b)));
    CHECK(map.travel_time_via(a, b, b) == doctest::Approx(map.travel_time(a, b)));
  }
  SUBCASE("detour property") {
    Rng rng(29);
    for (int trial = 0; trial < 100; ++trial) {
      const Position a = random_street_point(map, rng);
      const Position v = random_street_point(map, rng);
      const Position b = random_street_point(map, rng);
      CHECK(map.travel_time_via(a, v, b) >= map.travel_time(a, b) - 1e-9);
    }
  }
}

TEST_CASE("distances scale with cell size and speed") {
  const GridMap base(4, 4, 200.0, 4.0);
  const GridMap doubled(4, 4, 400.0, 4.0);
  const GridMap faster(4, 4, 200.0, 8.0);
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const int na = rng.uniform_int(base.num_nodes());
    const int nb = rng.uniform_int(base.num_nodes());
    const double t = base.travel_time(base.node(na), base.node(nb));
    CHECK(doubled.travel_time(doubled.node(na), doubled.node(nb)) ==
          doctest::Approx(2.0 * t).epsilon(1e-12));
    CHECK(faster.travel_time(faster.node(na), faster.node(nb)) ==
          doctest::Approx(0.5 * t).epsilon(1e-12));
  }
}

TEST_CASE("off-grid positions are rejected") {
  const GridMap map = paper_map();
  CHECK_THROWS_AS(map.travel_time(pos(50, 50), pos(0, 0)), std::invalid_argument);
  CHECK_THROWS_AS(map.travel_time(pos(0, 0), pos(-10, 0)), std::invalid_argument);
  CHECK_THROWS_AS(map.travel_time(pos(0, 0), pos(0, 700)), std::invalid_argument);
}

TEST_CASE("grid construction validates its parameters") {
  CHECK_THROWS_AS(GridMap(1, 4, 200.0, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(GridMap(4, 4, 0.0, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(GridMap(4, 4, 200.0, -1.0), std::invalid_argument);
}

TEST_CASE("mean pairwise distance") {
  const GridMap map(3, 3, 200.0, 4.0);
  SUBCASE("coincident pair") {
    const Position p[] = {pos(0, 0), pos(0, 0)};
    CHECK(mean_pairwise_distance(map, p) == doctest::Approx(0.0));
  }
  SUBCASE("single edge") {
    const Position p[] = {pos(0, 0), pos(0, 200)};
    CHECK(mean_pairwise_distance(map, p) == doctest::Approx(200.0));
  }
  SUBCASE("four corners of a 400 x 400 block") {
    const Position p[] = {pos(0, 0), pos(400, 0), pos(0, 400), pos(400, 400)};
    CHECK(mean_pairwise_distance(map, p) == doctest::Approx(3200.0 / 6.0));
  }
  SUBCASE("fewer than two points") {
    const Position p[] = {pos(0, 0)};
    CHECK_THROWS_AS(mean_pairwise_distance(map, p), std::invalid_argument);
  }
}

TEST_CASE("shortest path waypoints trace a valid street route of the right length") {
  const GridMap map = paper_map();
  Rng rng(47);
  for (int trial = 0; trial < 200; ++trial) {
    const Position a = random_street_point(map, rng);
    const Position b = random_street_point(map, rng);
    const auto path = map.shortest_path(a, b);
    REQUIRE(!path.empty());
    CHECK(same_point(path.front(), map.snap(a), 1e-6));
    CHECK(same_point(path.back(), map.snap(b), 1e-6));
    double len = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) {
      const double dx = std::abs(path[i].x - path[i - 1].x);
      const double dy = std::abs(path[i].y - path[i - 1].y);
      CHECK((dx < 1e-9 || dy < 1e-9));  // axis-aligned legs only
      len += dx + dy;
      CHECK(map.on_grid(path[i]));
    }
    CHECK(len == doctest::Approx(map.distance(a, b)).epsilon(1e-9));
  }
}
