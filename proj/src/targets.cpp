#include "targets.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace mmdp {

OperationalStats OperationalStats::cold_start(const GridMap& map) {
  OperationalStats s;
  s.theta_c = s.theta_s = s.theta_s_vac = map.diameter_seconds() / 2.0;
  s.occupancy = 0.5;
  return s;
}

namespace {

void running_mean(double& mean, std::uint64_t& n, double x) {
  ++n;
  mean += (x - mean) / static_cast<double>(n);
}

}  // namespace

void OperationalStats::add_customer_dispatch(double seconds) {
  if (seconds <= 0.0) throw std::invalid_argument("dispatch time must be positive");
  if (n_theta_c == 0) theta_c = 0.0;
  running_mean(theta_c, n_theta_c, seconds);
}

void OperationalStats::add_station_dispatch(double seconds, bool vehicle_was_vacant) {
  if (seconds <= 0.0) throw std::invalid_argument("dispatch time must be positive");
  if (n_theta_s == 0) theta_s = 0.0;
  running_mean(theta_s, n_theta_s, seconds);
  if (vehicle_was_vacant) {
    if (n_theta_s_vac == 0) theta_s_vac = 0.0;
    running_mean(theta_s_vac, n_theta_s_vac, seconds);
  }
}

void OperationalStats::add_occupancy_sample(double fraction_occupied) {
  if (fraction_occupied < 0.0 || fraction_occupied > 1.0)
    throw std::invalid_argument("occupancy sample must lie in [0, 1]");
  if (n_occupancy == 0) occupancy = 0.0;
  running_mean(occupancy, n_occupancy, fraction_occupied);
}

std::vector<double> station_selection_probs(std::span<const Position> stations,
                                            const DemandModel& demand, double theta_c,
                                            const GridMap& map) {
  if (stations.empty()) throw std::invalid_argument("need at least one station");
  if (theta_c <= 0.0) throw std::invalid_argument("theta_c must be positive");
  const int n_s = static_cast<int>(stations.size());
  std::vector<double> probs(n_s, 0.0);
  std::vector<double> kernel(n_s);
  for (int cell = 0; cell < demand.num_cells(); ++cell) {
    const double pc = demand.origin_prob(cell);
    if (pc <= 0.0) continue;
    const Position c = map.node(cell);
    double tmin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n_s; ++j) {
      kernel[j] = map.travel_time(stations[j], c);
      tmin = std::min(tmin, kernel[j]);
    }
    double norm = 0.0;
    for (int j = 0; j < n_s; ++j) {
      kernel[j] = std::exp(-(kernel[j] - tmin) / theta_c);
      norm += kernel[j];
    }
    for (int j = 0; j < n_s; ++j) probs[j] += pc * kernel[j] / norm;
  }
  return probs;
}

namespace {

double binomial_log_pmf(int trials, double p, int k) {
  if (p >= 1.0) return k == trials ? 0.0 : -std::numeric_limits<double>::infinity();
  if (p <= 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  const double lc = std::lgamma(trials + 1.0) - std::lgamma(k + 1.0) -
                    std::lgamma(trials - k + 1.0);
  return lc + k * std::log(p) + (trials - k) * std::log1p(-p);
}

}  // namespace

double t_sj_dynamic(const WorldState& state, int station_j, const OperationalStats& stats,
                    int n_c, const GridMap& map) {
  const int n = state.num_vehicles();
  const int n_s = state.num_stations();
  if (station_j < 0 || station_j >= n_s) throw std::out_of_range("station index out of range");
  if (n_c < 0 || n_c > n) throw std::invalid_argument("customer count out of range");
  const int surplus = n - n_c;
  if (surplus < 1) return stats.theta_s;

  // enumerated subsets: sizes 1..surplus over all n candidate vehicles
  std::uint64_t count = 0;
  {
    double c = 1.0;
    for (int k = 1; k <= surplus; ++k) {
      c = c * (n - k + 1) / k;
      count += static_cast<std::uint64_t>(c + 0.5);
      if (count > kDynamicSubsetCap) break;
    }
  }
  if (count > kDynamicSubsetCap)
    throw std::runtime_error(
        "dynamic travel-time estimate: subset enumeration exceeds the cap; use static mode");

  const Position sj = state.stations[station_j];
  std::vector<double> via(n);
  double tmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const Vehicle& v = state.vehicles[i];
    via[i] = map.travel_time_via(v.position, v.planning_destination(), sj);
    tmin = std::min(tmin, via[i]);
  }

  // Per subset size: softmax expectation of the subset-mean via time, with
  // decay scale theta_s. Sizes combine under the binomial law, renormalized
  // over non-empty subsets.
  std::vector<double> level_norm(surplus + 1, 0.0), level_sum(surplus + 1, 0.0);
  const std::uint64_t full = 1ULL << n;
  for (std::uint64_t mask = 1; mask < full; ++mask) {
    const int size = std::popcount(mask);
    if (size > surplus) continue;
    double sum = 0.0;
    std::uint64_t m = mask;
    while (m) {
      sum += via[std::countr_zero(m)];
      m &= m - 1;
    }
    const double mean = sum / size;
    const double w = std::exp(-(mean - tmin) / stats.theta_s);
    level_norm[size] += w;
    level_sum[size] += w * mean;
  }

  double expectation = 0.0;
  double total_pmf = 0.0;
  for (int k = 1; k <= surplus; ++k) {
    const double pmf = std::exp(binomial_log_pmf(surplus, 1.0 / n_s, k));
    if (pmf <= 0.0 || level_norm[k] <= 0.0) continue;
    expectation += pmf * (level_sum[k] / level_norm[k]);
    total_pmf += pmf;
  }
  return expectation / total_pmf;
}

double t_sj_static(int station_j, const DemandModel& demand, const OperationalStats& stats,
                   std::span<const Position> stations, const GridMap& map) {
  if (station_j < 0 || station_j >= static_cast<int>(stations.size()))
    throw std::out_of_range("station index out of range");
  const Position sj = stations[station_j];
  const int cells = demand.num_cells();
  std::vector<double> to_station(cells);
  for (int d = 0; d < cells; ++d) to_station[d] = map.travel_time(map.node(d), sj);
  double occupied_term = 0.0;
  for (int c = 0; c < cells; ++c) {
    const double pc = demand.origin_prob(c);
    if (pc <= 0.0) continue;
    const Position origin = map.node(c);
    for (int d = 0; d < cells; ++d) {
      const double pd = demand.dest_prob(d);
      if (pd <= 0.0) continue;
      const double trip = map.travel_time(origin, map.node(d));
      occupied_term += pc * pd * (trip / 2.0 + to_station[d]);
    }
  }
  const double o = stats.occupancy;
  return o * occupied_term + (1.0 - o) * stats.theta_s_vac;
}

StationTargets compute_targets(TargetMode mode, const WorldState& state,
                               const DemandModel& demand, const OperationalStats& stats,
                               std::span<const Position> stations, const GridMap& map) {
  StationTargets t;
  t.mode = mode;
  t.p_select = station_selection_probs(stations, demand, stats.theta_c, map);
  const int n_s = static_cast<int>(stations.size());
  t.t_sj.resize(n_s);
  const int n_c = std::min<int>(static_cast<int>(state.waiting.size()), state.num_vehicles());
  WorldState dyn_state;
  if (mode == TargetMode::dynamic_mode) {
    dyn_state = state;
    dyn_state.stations.assign(stations.begin(), stations.end());
  }
  for (int j = 0; j < n_s; ++j) {
    t.t_sj[j] = mode == TargetMode::dynamic_mode
                    ? t_sj_dynamic(dyn_state, j, stats, n_c, map)
                    : t_sj_static(j, demand, stats, stations, map);
  }
  t.tau.resize(n_s);
  for (int j = 0; j < n_s; ++j) t.tau[j] = t.t_sj[j] * demand.rate_fc() * t.p_select[j];
  return t;
}

}  // namespace mmdp
