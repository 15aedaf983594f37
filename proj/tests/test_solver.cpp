#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "rng.hpp"
#include "solver.hpp"

using namespace mmdp;
using testhelp::pos;

namespace {

GridMap paper_map() { return GridMap(4, 4, 200.0, 4.0); }

QuboProblem bare_problem(int n_vars) {
  VarMap vm;
  vm.formulation = Formulation::proposed;
  vm.num_vehicles = 1;
  vm.num_stations = n_vars;
  vm.num_customers = 0;
  return QuboProblem(vm);
}

QuboProblem random_problem(Rng& rng, int n_vars, double density = 0.5) {
  QuboProblem p = bare_problem(n_vars);
  p.add_offset(rng.uniform(-1.0, 1.0));
  for (int i = 0; i < n_vars; ++i) p.add_linear(i, rng.uniform(-2.0, 2.0));
  for (int i = 0; i < n_vars; ++i)
    for (int j = i + 1; j < n_vars; ++j)
      if (rng.bernoulli(density)) p.add_quadratic(i, j, rng.uniform(-2.0, 2.0));
  return p;
}

SolverParams quick_params(std::uint64_t seed) {
  SolverParams params;
  params.seed = seed;
  params.reads = 8;
  params.sweeps = 192;
  params.replicas = 16;
  return params;
}

}  // namespace

TEST_CASE("anneal schedules") {
  const AnnealSchedule fwd = AnnealSchedule::forward();
  CHECK(fwd.value(0.0) == doctest::Approx(0.0));
  CHECK(fwd.value(0.5) == doctest::Approx(0.5));
  CHECK(fwd.value(1.0) == doctest::Approx(1.0));

  const AnnealSchedule rev = AnnealSchedule::reverse(0.4);
  CHECK(rev.value(0.0) == doctest::Approx(1.0));
  CHECK(rev.value(0.25) == doctest::Approx(0.4));
  CHECK(rev.value(0.5) == doctest::Approx(0.4));  // hold
  CHECK(rev.value(1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(AnnealSchedule::reverse(0.0), std::invalid_argument);
  CHECK_THROWS_AS(AnnealSchedule::reverse(1.2), std::invalid_argument);
}

TEST_CASE("exhaustive search basics") {
  SUBCASE("single negative field") {
    QuboProblem p = bare_problem(1);
    p.add_offset(2.0);
    p.add_linear(0, -3.0);
    const auto [bits, e] = brute_force(p);
    CHECK(bits == std::vector<std::uint8_t>{1});
    CHECK(e == doctest::Approx(-1.0));
  }
  SUBCASE("symmetric tie resolves to the smaller binary value") {
    QuboProblem p = bare_problem(2);
    p.add_quadratic(0, 1, 10.0);
    p.add_linear(0, -1.0);
    p.add_linear(1, -1.0);
    const auto [bits, e] = brute_force(p);
    CHECK(bits == std::vector<std::uint8_t>{1, 0});
    CHECK(e == doctest::Approx(-1.0));
  }
  SUBCASE("matches an independent enumerator") {
    Rng rng(11);
    for (int trial = 0; trial < 5; ++trial) {
      const QuboProblem p = random_problem(rng, 16);
      const auto [bits, e] = brute_force(p);
      const auto [ref_bits, ref_e] = testhelp::enumerate_minimum(p);
      CHECK(e == doctest::Approx(ref_e).epsilon(1e-12));
      CHECK(bits == ref_bits);
    }
  }
  SUBCASE("refuses oversized problems") {
    const QuboProblem p = bare_problem(25);
    CHECK_THROWS_AS(brute_force(p), std::invalid_argument);
  }
}

TEST_CASE("classical annealer finds easy minima") {
  SUBCASE("positive field keeps the bit off") {
    QuboProblem p = bare_problem(1);
    p.add_linear(0, 5.0);
    const SolveReport r = solve_sa(p, quick_params(1));
    CHECK(r.best().bits == std::vector<std::uint8_t>{0});
    CHECK(r.best_energy == doctest::Approx(0.0));
  }
  SUBCASE("flat landscape returns the offset") {
    QuboProblem p = bare_problem(3);
    p.add_offset(4.25);
    const SolveReport r = solve_sa(p, quick_params(2));
    CHECK(r.best_energy == doctest::Approx(4.25));
  }
}

TEST_CASE("classical annealer reaches the exhaustive minimum on most seeds") {
  Rng rng(21);
  int hits = 0;
  const int total = 100;
  for (int trial = 0; trial < total; ++trial) {
    const QuboProblem p = random_problem(rng, 12);
    const auto [bits, e_opt] = brute_force(p);
    const SolveReport r = solve_sa(p, quick_params(500 + trial));
    CHECK(r.best_energy >= e_opt - 1e-9);
    if (r.best_energy <= e_opt + 1e-9) ++hits;
  }
  CHECK(hits >= 95);
}

TEST_CASE("path-integral annealer basics") {
  SUBCASE("attracting pair settles on both bits set") {
    QuboProblem p = bare_problem(2);
    p.add_quadratic(0, 1, -1.0);
    const SolveReport r = solve_sqa(p, AnnealSchedule::forward(), quick_params(3));
    CHECK(r.best_energy == doctest::Approx(-1.0));
    CHECK(r.best().bits == std::vector<std::uint8_t>{1, 1});
  }
  SUBCASE("reverse schedule requires an initial state") {
    QuboProblem p = bare_problem(2);
    CHECK_THROWS_AS(solve_sqa(p, AnnealSchedule::reverse(0.4), quick_params(4)),
                    std::invalid_argument);
  }
  SUBCASE("identical seeds reproduce the report") {
    Rng rng(31);
    const QuboProblem p = random_problem(rng, 10);
    const SolveReport a = solve_sqa(p, AnnealSchedule::forward(), quick_params(5));
    const SolveReport b = solve_sqa(p, AnnealSchedule::forward(), quick_params(5));
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
      CHECK(a.samples[i].bits == b.samples[i].bits);
      CHECK(a.samples[i].energy == b.samples[i].energy);
    }
  }
}

TEST_CASE("annealers never beat the exhaustive minimum") {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const QuboProblem p = random_problem(rng, 14);
    const auto [bits, e_opt] = brute_force(p);
    const SolveReport sa = solve_sa(p, quick_params(900 + trial));
    const SolveReport sqa = solve_sqa(p, AnnealSchedule::forward(), quick_params(900 + trial));
    CHECK(sa.best_energy >= e_opt - 1e-9);
    CHECK(sqa.best_energy >= e_opt - 1e-9);
  }
}

TEST_CASE("including the warm start can only help") {
  Rng rng(51);
  const GridMap map = paper_map();
  for (int trial = 0; trial < 10; ++trial) {
    auto [state, problem] = testhelp::random_proposed_problem(map, rng, 16);
    StationTargets targets = testhelp::fixed_targets(
        std::vector<double>(state.stations.size(), 0.5));
    const auto initial = greedy_initial_state(state, targets, problem, map);
    SolverParams without = quick_params(700 + trial);
    SolverParams with = without;
    with.include_initial = true;
    const SolveReport a = solve_sqa(problem, AnnealSchedule::reverse(0.4), without, &initial);
    const SolveReport b = solve_sqa(problem, AnnealSchedule::reverse(0.4), with, &initial);
    CHECK(b.best_energy <= a.best_energy + 1e-12);
    CHECK(b.best_energy <= problem.energy(initial) + 1e-12);
    CHECK(b.initial_state_included);
    CHECK(!a.initial_state_included);
    CHECK(b.samples.size() == a.samples.size() + 1);
  }
}

TEST_CASE("reverse anneal with a ground-state warm start keeps it") {
  Rng rng(61);
  const QuboProblem p = random_problem(rng, 10);
  const auto [opt_bits, e_opt] = brute_force(p);
  SolverParams params = quick_params(8);
  params.include_initial = true;
  const SolveReport r = solve_sqa(p, AnnealSchedule::reverse(0.4), params, &opt_bits);
  CHECK(r.best_energy == doctest::Approx(e_opt));
}

TEST_CASE("a frozen reverse schedule cannot drift above its warm start") {
  Rng rng(71);
  const GridMap map = paper_map();
  for (int trial = 0; trial < 5; ++trial) {
    auto [state, problem] = testhelp::random_proposed_problem(map, rng, 14);
    StationTargets targets =
        testhelp::fixed_targets(std::vector<double>(state.stations.size(), 0.5));
    const auto initial = greedy_initial_state(state, targets, problem, map);
    const double e_init = problem.energy(initial);
    const SolveReport r =
        solve_sqa(problem, AnnealSchedule::reverse(1.0), quick_params(42 + trial), &initial);
    CHECK(r.best_energy <= e_init + 1e-9);
    // with the transverse field gone the replicas never leave the start
    for (const Sample& s : r.samples) CHECK(s.bits == initial);
  }
}

TEST_CASE("single-replica zero-field sampler behaves like plain annealing") {
  Rng rng(81);
  int hits = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const QuboProblem p = random_problem(rng, 10);
    const auto [bits, e_opt] = brute_force(p);
    SolverParams params = quick_params(300 + trial);
    params.replicas = 1;
    params.gamma0 = 0.0;
    params.beta = 6.0;
    const SolveReport r = solve_sqa(p, AnnealSchedule::forward(), params);
    CHECK(r.best_energy >= e_opt - 1e-9);
    if (r.best_energy <= e_opt + 1e-9) ++hits;
  }
  // fixed-temperature single-flip sampling still finds most small minima
  CHECK(hits >= 15);
}

TEST_CASE("warm-start construction") {
  const GridMap map = paper_map();
  SUBCASE("no surplus vehicles sets no station bits") {
    WorldState s;
    s.stations = {pos(200, 200)};
    s.vehicles = {testhelp::vacant_vehicle(0, pos(0, 0))};
    s.waiting = {testhelp::customer(0, pos(400, 0), pos(0, 400))};
    const StationTargets targets = testhelp::fixed_targets({0.9});
    const QuboProblem p = build_proposed(s, targets, QuboWeights{}, map);
    const auto bits = greedy_initial_state(s, targets, p, map);
    CHECK(bits[p.varmap().customer_var(0, 0)] == 1);
    CHECK(bits[p.varmap().station_var(0, 0)] == 0);
  }
  SUBCASE("single surplus vehicle goes to the highest target") {
    WorldState s;
    s.stations = {pos(200, 200), pos(400, 400)};
    s.vehicles = {testhelp::vacant_vehicle(0, pos(0, 0))};
    const StationTargets targets = testhelp::fixed_targets({0.9, 0.2});
    const QuboProblem p = build_proposed(s, targets, QuboWeights{}, map);
    const auto bits = greedy_initial_state(s, targets, p, map);
    CHECK(bits[p.varmap().station_var(0, 0)] == 1);
  }
  SUBCASE("targets are decremented as vehicles are spent") {
    WorldState s;
    s.stations = {pos(200, 200), pos(400, 400)};
    s.vehicles = {testhelp::vacant_vehicle(0, pos(200, 0)),
                  testhelp::vacant_vehicle(1, pos(0, 200)),
                  testhelp::vacant_vehicle(2, pos(600, 600))};
    const StationTargets targets = testhelp::fixed_targets({1.6, 0.3});
    const QuboProblem p = build_proposed(s, targets, QuboWeights{}, map);
    const auto bits = greedy_initial_state(s, targets, p, map);
    // station 0 twice (tau 1.6 -> 0.6 -> -0.4), then station 1
    CHECK(bits[p.varmap().station_var(0, 0)] == 1);
    CHECK(bits[p.varmap().station_var(1, 0)] == 1);
    CHECK(bits[p.varmap().station_var(2, 1)] == 1);
  }
  SUBCASE("warm starts always satisfy the hard constraints") {
    Rng rng(91);
    for (int trial = 0; trial < 20; ++trial) {
      auto [state, problem] = testhelp::random_proposed_problem(map, rng, 20);
      StationTargets targets =
          testhelp::fixed_targets(std::vector<double>(state.stations.size(), 0.0));
      for (double& tau : targets.tau) tau = rng.uniform(0.0, 2.0);
      const auto bits = greedy_initial_state(state, targets, problem, map);
      CHECK(decode(problem, bits).feasible);
    }
  }
}

TEST_CASE("time-to-solution formula") {
  CHECK(tts(0.99, 0.99, 17.0) == doctest::Approx(17.0));
  CHECK(tts(0.99, 0.01, 20e-6) == doctest::Approx(9164.2e-6).epsilon(1e-3));
  CHECK(tts(0.99, 0.999999, 20e-6) < 20e-6);
  CHECK_THROWS_AS(tts(0.99, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(tts(0.99, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(tts(0.0, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("residual energy") {
  CHECK(residual_energy(1.0, 1.0) == doctest::Approx(0.0));
  CHECK(residual_energy(1.1, 1.0) == doctest::Approx(0.1));
  CHECK_THROWS_AS(residual_energy(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("ground-truth annotations") {
  Rng rng(99);
  const QuboProblem p = random_problem(rng, 10);
  const auto [bits, e_opt] = brute_force(p);
  SolveReport r = solve_sa(p, quick_params(123));
  attach_ground_truth(r, e_opt);
  REQUIRE(r.e_opt.has_value());
  CHECK(*r.e_opt == e_opt);
  REQUIRE(r.p_opt.has_value());
  CHECK(*r.p_opt >= 0.0);
  CHECK(*r.p_opt <= 1.0);
  CHECK(r.best_energy >= e_opt - 1e-9);
  if (e_opt != 0.0) {
    REQUIRE(r.e_res.has_value());
    CHECK(*r.e_res == doctest::Approx((r.best_energy - e_opt) / e_opt));
  }
}
