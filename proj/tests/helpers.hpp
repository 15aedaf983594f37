#pragma once

// Shared fixtures and reference implementations for the test suites. The
// reference evaluators here recompute quantities straight from their defining
// expressions, independent of the library's coefficient expansions.

#include <cmath>
#include <cstdint>
#include <vector>

#include "demand.hpp"
#include "grid.hpp"
#include "qubo.hpp"
#include "rng.hpp"
#include "sim.hpp"
#include "solver.hpp"
#include "state.hpp"
#include "targets.hpp"

namespace testhelp {

using namespace mmdp;

inline Position pos(double x, double y) { return Position{x, y}; }

inline CustomerRequest customer(std::uint64_t id, Position origin, Position dest,
                                double t = 0.0) {
  CustomerRequest r;
  r.id = id;
  r.origin = origin;
  r.destination = dest;
  r.request_time = t;
  return r;
}

inline Vehicle vacant_vehicle(int id, Position p) {
  Vehicle v;
  v.id = id;
  v.position = p;
  return v;
}

inline Vehicle occupied_vehicle(int id, Position p, Position dropoff, std::uint64_t passenger) {
  Vehicle v;
  v.id = id;
  v.position = p;
  v.passenger = passenger;
  v.dropoff = dropoff;
  return v;
}

// plain O(n^2) energy evaluation from the raw coefficient tables
inline double naive_energy(const QuboProblem& p, const std::vector<std::uint8_t>& bits) {
  double e = p.offset();
  for (int i = 0; i < p.num_vars(); ++i)
    if (bits[i]) e += p.linear()[i];
  for (const auto& [ij, c] : p.quadratic())
    e += c * bits[ij.first] * bits[ij.second];
  return e;
}

// ---- reference evaluation of the single-step Hamiltonian ----

struct ProposedTerms {
  double h_a0 = 0.0;
  double h_a1 = 0.0;
  double h_b0 = 0.0;  // already normalized
  double h_b1 = 0.0;
  double total(const QuboWeights& w) const {
    return h_a0 + (w.enable_ha1 ? h_a1 : 0.0) + w.b0 * h_b0 + (w.enable_hb1 ? w.b1 * h_b1 : 0.0);
  }
};

inline ProposedTerms eval_proposed_terms(const WorldState& state, const StationTargets& targets,
                                         const GridMap& map,
                                         const std::vector<std::uint8_t>& bits) {
  const int n = state.num_vehicles();
  const int n_s = state.num_stations();
  const int n_c = static_cast<int>(state.waiting.size());
  auto sigma_s = [&](int i, int j) { return static_cast<int>(bits[i * n_s + j]); };
  auto sigma_c = [&](int i, int k) { return static_cast<int>(bits[n * n_s + i * n_c + k]); };
  auto via = [&](int i, const Position& target) {
    const Vehicle& v = state.vehicles[i];
    return map.travel_time_via(v.position, v.planning_destination(), target);
  };

  ProposedTerms t;
  for (int i = 0; i < n; ++i) {
    int row = 0;
    for (int j = 0; j < n_s; ++j) row += sigma_s(i, j);
    for (int k = 0; k < n_c; ++k) row += sigma_c(i, k);
    t.h_a0 += (1.0 - row) * (1.0 - row);
  }
  for (int k = 0; k < n_c; ++k) {
    int col = 0;
    for (int i = 0; i < n; ++i) col += sigma_c(i, k);
    t.h_a1 += (1.0 - col) * (1.0 - col);
  }
  double cost = 0.0, coeff_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n_s; ++j) {
      const double tt = via(i, state.stations[j]);
      coeff_sum += tt;
      cost += tt * sigma_s(i, j);
    }
    for (int k = 0; k < n_c; ++k) {
      const double tt = via(i, state.waiting[k].origin);
      coeff_sum += tt;
      cost += tt * sigma_c(i, k);
    }
  }
  double t_avg = coeff_sum / (static_cast<double>(n) * (n_s + n_c));
  if (t_avg <= 0.0) t_avg = 1.0;
  t.h_b0 = cost / t_avg;
  for (int j = 0; j < n_s; ++j) {
    int cnt = 0;
    for (int i = 0; i < n; ++i) cnt += sigma_s(i, j);
    t.h_b1 += (targets.tau[j] - cnt) * (targets.tau[j] - cnt);
  }
  return t;
}

// ---- reference evaluation of the two-step (routing) Hamiltonian ----

struct VrpTerms {
  double h_a0 = 0.0;
  double h_a1 = 0.0;
  double h_a2 = 0.0;
  double h_a3 = 0.0;
  double h_b = 0.0;
  double constraint(double a2) const { return h_a0 + h_a1 + a2 * h_a2 + h_a3; }
  double total(const QuboWeights& w) const { return constraint(w.a2) + w.b_vrp * h_b; }
};

inline VrpTerms eval_vrp_terms(const WorldState& state, const GridMap& map,
                               const std::vector<std::uint8_t>& bits) {
  const int n = state.num_vehicles();
  const int n_s = state.num_stations();
  const int n_c = static_cast<int>(state.waiting.size());
  auto sigma_s = [&](int i, int j) { return static_cast<int>(bits[i * n_s + j]); };
  auto sigma_c = [&](int i, int k, int slot) {
    return static_cast<int>(bits[n * n_s + (slot - 1) * n * n_c + i * n_c + k]);
  };
  auto leg = [&](const Position& a, const Position& b) { return map.travel_time(a, b); };

  VrpTerms t;
  for (int k = 0; k < n_c; ++k) {
    int count = 0;
    for (int i = 0; i < n; ++i) count += sigma_c(i, k, 1) + sigma_c(i, k, 2);
    t.h_a0 += (1.0 - count) * (1.0 - count);
  }
  const int n_first = std::min(n, n_c);
  int slot1_total = 0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n_c; ++k) slot1_total += sigma_c(i, k, 1);
  t.h_a1 = (n_first - slot1_total) * (n_first - slot1_total);
  for (int i = 0; i < n; ++i) {
    int stations = 0, both_slots = 0, slot2 = 0;
    for (int j = 0; j < n_s; ++j) stations += sigma_s(i, j);
    for (int k = 0; k < n_c; ++k) {
      both_slots += sigma_c(i, k, 1) + sigma_c(i, k, 2);
      slot2 += sigma_c(i, k, 2);
    }
    t.h_a2 += (1.0 - stations) * (2.0 - both_slots) + stations * slot2;
    for (int j1 = 0; j1 < n_s; ++j1)
      for (int j2 = 0; j2 < j1; ++j2) t.h_a3 += sigma_s(i, j1) * sigma_s(i, j2);
    for (int slot = 1; slot <= 2; ++slot)
      for (int k1 = 0; k1 < n_c; ++k1)
        for (int k2 = 0; k2 < k1; ++k2)
          t.h_a3 += sigma_c(i, k1, slot) * sigma_c(i, k2, slot);
  }
  for (int i = 0; i < n; ++i) {
    const Vehicle& v = state.vehicles[i];
    const Position fp = v.planning_destination();
    const double head = leg(v.position, fp);
    for (int j = 0; j < n_s; ++j) {
      int slot1 = 0;
      for (int k = 0; k < n_c; ++k) slot1 += sigma_c(i, k, 1);
      t.h_b += (head + leg(fp, state.stations[j])) * sigma_s(i, j) * (1 - slot1);
      for (int k = 0; k < n_c; ++k)
        t.h_b += (head + leg(fp, state.waiting[k].origin) +
                  leg(state.waiting[k].origin, state.stations[j])) *
                 sigma_s(i, j) * sigma_c(i, k, 1);
    }
    for (int k1 = 0; k1 < n_c; ++k1)
      for (int k2 = 0; k2 < n_c; ++k2)
        t.h_b += (head + leg(fp, state.waiting[k1].origin) +
                  leg(state.waiting[k1].origin, state.waiting[k2].origin)) *
                 sigma_c(i, k1, 1) * sigma_c(i, k2, 2);
  }
  return t;
}

// ---- random fixtures ----

inline WorldState random_state(const GridMap& map, Rng& rng, int n_vehicles, int n_stations,
                               int n_customers) {
  WorldState s;
  for (int j = 0; j < n_stations; ++j)
    s.stations.push_back(map.node(rng.uniform_int(map.num_nodes())));
  for (int i = 0; i < n_vehicles; ++i) {
    Vehicle v;
    v.id = i;
    v.position = map.node(rng.uniform_int(map.num_nodes()));
    if (rng.bernoulli(0.5)) {
      int d = rng.uniform_int(map.num_nodes());
      while (same_point(map.node(d), v.position)) d = rng.uniform_int(map.num_nodes());
      v.passenger = 500 + static_cast<std::uint64_t>(i);
      v.dropoff = map.node(d);
      s.in_service.push_back(*v.passenger);
    }
    s.vehicles.push_back(v);
  }
  for (int k = 0; k < n_customers; ++k) {
    int oc = rng.uniform_int(map.num_nodes());
    int dc = rng.uniform_int(map.num_nodes());
    while (dc == oc) dc = rng.uniform_int(map.num_nodes());
    s.waiting.push_back(customer(k, map.node(oc), map.node(dc), k));
  }
  return s;
}

inline StationTargets fixed_targets(std::vector<double> tau) {
  StationTargets t;
  t.tau = std::move(tau);
  t.p_select.assign(t.tau.size(), 1.0 / t.tau.size());
  t.t_sj.assign(t.tau.size(), 100.0);
  return t;
}

inline std::vector<std::uint8_t> random_bits(Rng& rng, int n) {
  std::vector<std::uint8_t> bits(n);
  for (int i = 0; i < n; ++i) bits[i] = rng.bernoulli(0.5) ? 1 : 0;
  return bits;
}

inline std::vector<std::uint8_t> bits_of(std::uint64_t value, int n) {
  std::vector<std::uint8_t> bits(n);
  for (int i = 0; i < n; ++i) bits[i] = (value >> i) & 1;
  return bits;
}

// independent exhaustive minimizer in plain binary counting order
inline std::pair<std::vector<std::uint8_t>, double> enumerate_minimum(const QuboProblem& p) {
  const int n = p.num_vars();
  std::vector<std::uint8_t> best;
  double best_e = std::numeric_limits<double>::infinity();
  for (std::uint64_t v = 0; v < (1ULL << n); ++v) {
    const auto bits = bits_of(v, n);
    const double e = naive_energy(p, bits);
    if (e < best_e) {
      best_e = e;
      best = bits;
    }
  }
  return {best, best_e};
}

// random dispatch scene paired with a single-step problem of <= max_vars
inline std::pair<WorldState, QuboProblem> random_proposed_problem(const GridMap& map, Rng& rng,
                                                                  int max_vars,
                                                                  QuboWeights weights = {}) {
  for (;;) {
    const int n_v = 2 + rng.uniform_int(3);
    const int n_s = 1 + rng.uniform_int(2);
    const int n_c = rng.uniform_int(std::min(n_v, 2) + 1);
    if (n_v * (n_s + n_c) > max_vars) continue;
    WorldState s = random_state(map, rng, n_v, n_s, n_c);
    StationTargets t = fixed_targets(std::vector<double>(n_s, 0.0));
    for (int j = 0; j < n_s; ++j) t.tau[j] = rng.uniform(0.0, 2.0);
    return {s, build_proposed(s, t, weights, map)};
  }
}

// ---- reference implementations of the station-target quantities ----

// literal double sum over demand cells with the normalized exponential kernel
inline std::vector<double> reference_selection_probs(const std::vector<Position>& stations,
                                                     const DemandModel& demand, double theta_c,
                                                     const GridMap& map) {
  std::vector<double> out(stations.size(), 0.0);
  for (int cell = 0; cell < demand.num_cells(); ++cell) {
    long double denom = 0.0;
    for (const Position& s : stations)
      denom += std::exp(-static_cast<long double>(map.travel_time(s, map.node(cell))) / theta_c);
    for (std::size_t j = 0; j < stations.size(); ++j) {
      const long double num =
          std::exp(-static_cast<long double>(map.travel_time(stations[j], map.node(cell))) /
                   theta_c);
      out[j] += static_cast<double>(demand.origin_prob(cell) * num / denom);
    }
  }
  return out;
}

// recursive combination enumeration in long double; subset sizes weighted by
// the binomial law, subsets within a size by exponential decay of their mean
struct SubsetOracle {
  const std::vector<double>& via;
  double theta_s;

  void combos(int start, int remaining, int chosen, double sum, long double& w_sum,
              long double& wt_sum) const {
    if (remaining == 0) {
      const double mean = sum / chosen;
      const long double w = std::exp(static_cast<long double>(-mean / theta_s));
      w_sum += w;
      wt_sum += w * mean;
      return;
    }
    for (int i = start; i + remaining <= static_cast<int>(via.size()); ++i)
      combos(i + 1, remaining - 1, chosen, sum + via[i], w_sum, wt_sum);
  }

  double evaluate(int surplus, int n_s) const {
    long double total = 0.0, norm = 0.0;
    for (int size = 1; size <= surplus; ++size) {
      long double w_sum = 0.0, wt_sum = 0.0;
      combos(0, size, size, 0.0, w_sum, wt_sum);
      long double pmf = 1.0;
      for (int i = 0; i < size; ++i) pmf *= static_cast<long double>(surplus - i) / (i + 1);
      pmf *= std::pow(static_cast<long double>(1.0) / n_s, size);
      pmf *= std::pow(1.0 - static_cast<long double>(1.0) / n_s, surplus - size);
      total += pmf * (wt_sum / w_sum);
      norm += pmf;
    }
    return static_cast<double>(total / norm);
  }
};

// literal evaluation of the occupied/vacant split
inline double reference_tsj_static(const Position& station, const DemandModel& demand,
                                   const OperationalStats& stats, const GridMap& map) {
  long double occupied = 0.0;
  for (int c = 0; c < demand.num_cells(); ++c)
    for (int d = 0; d < demand.num_cells(); ++d) {
      const double trip = map.travel_time(map.node(c), map.node(d));
      const double tail = map.travel_time(map.node(d), station);
      occupied += static_cast<long double>(demand.origin_prob(c)) * demand.dest_prob(d) *
                  (trip / 2.0 + tail);
    }
  return static_cast<double>(stats.occupancy * occupied +
                             (1.0 - stats.occupancy) * stats.theta_s_vac);
}

// position after traveling dist meters along a waypoint path
inline Position walk_path(const GridMap& map, const std::vector<Position>& path, double dist) {
  Position p = path.front();
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double seg = std::abs(path[i].x - p.x) + std::abs(path[i].y - p.y);
    if (dist <= seg) {
      const double dx = path[i].x - p.x;
      const double dy = path[i].y - p.y;
      if (std::abs(dx) > 1e-9)
        p.x += (dx > 0 ? 1.0 : -1.0) * dist;
      else
        p.y += (dy > 0 ? 1.0 : -1.0) * dist;
      return map.snap(p);
    }
    dist -= seg;
    p = path[i];
  }
  return p;
}

}  // namespace testhelp
