#include "sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mmdp {

namespace {
constexpr double kEps = 1e-9;
}

PolicyKind policy_kind_from_name(const std::string& name) {
  if (name == "greedy") return PolicyKind::greedy;
  if (name == "proposed_static") return PolicyKind::proposed_static;
  if (name == "proposed_dynamic") return PolicyKind::proposed_dynamic;
  if (name == "proposed_no_ha1") return PolicyKind::proposed_no_ha1;
  if (name == "vrp") return PolicyKind::vrp;
  throw std::invalid_argument("unknown policy: " + name);
}

std::string policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::greedy: return "greedy";
    case PolicyKind::proposed_static: return "proposed_static";
    case PolicyKind::proposed_dynamic: return "proposed_dynamic";
    case PolicyKind::proposed_no_ha1: return "proposed_no_ha1";
    case PolicyKind::vrp: return "vrp";
  }
  return "unknown";
}

Assignment dispatch_greedy(const WorldState& state, const GridMap& map) {
  const int n = state.num_vehicles();
  const int n_c = std::min<int>(static_cast<int>(state.waiting.size()), n);
  Assignment a;
  a.plans.resize(n);
  std::vector<bool> taken(n, false);
  // waiting is sorted by request time, so index order is wait-time order
  for (int k = 0; k < n_c; ++k) {
    int best = -1;
    double best_t = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (taken[i]) continue;
      const Vehicle& v = state.vehicles[i];
      const double t =
          map.travel_time_via(v.position, v.planning_destination(), state.waiting[k].origin);
      if (t < best_t - kEps) {
        best_t = t;
        best = i;
      }
    }
    if (best < 0) break;
    taken[best] = true;
    a.plans[best].customers.push_back(k);
  }
  for (int i = 0; i < n; ++i) {
    if (taken[i]) continue;
    const Vehicle& v = state.vehicles[i];
    int best = 0;
    double best_t = std::numeric_limits<double>::infinity();
    for (int j = 0; j < state.num_stations(); ++j) {
      const double t = map.travel_time_via(v.position, v.planning_destination(), state.stations[j]);
      if (t < best_t - kEps) {
        best_t = t;
        best = j;
      }
    }
    a.plans[i].station = best;
  }
  a.feasible = true;
  return a;
}

Simulation::Simulation(const GridMap& map, const DemandModel& demand,
                       std::vector<Position> stations, std::vector<Position> vehicle_positions,
                       const Policy& policy, const SimConfig& config, std::uint64_t seed)
    : map_(map), demand_(demand), policy_(policy), config_(config), seed_(seed) {
  if (stations.empty()) throw std::invalid_argument("need at least one station");
  if (vehicle_positions.empty()) throw std::invalid_argument("need at least one vehicle");
  if (config.duration_s < 0.0) throw std::invalid_argument("duration must be non-negative");
  if (policy.kind == PolicyKind::vrp &&
      policy.solver.schedule == AnnealSchedule::Kind::reverse)
    throw std::invalid_argument("reverse-anneal warm starts are only defined for the single-step formulation");
  state_.stations.reserve(stations.size());
  for (const Position& s : stations) state_.stations.push_back(map.snap(s));
  state_.vehicles.resize(vehicle_positions.size());
  for (std::size_t i = 0; i < vehicle_positions.size(); ++i) {
    state_.vehicles[i].id = static_cast<int>(i);
    state_.vehicles[i].position = map.snap(vehicle_positions[i]);
  }
  stats_ = OperationalStats::cold_start(map);
  Rng arrival_rng(Rng::mix(seed, 0xA441));
  arrivals_ = demand_.sample_arrivals(map_, 0.0, config_.duration_s, arrival_rng);
}

void Simulation::set_motion(Vehicle& v, const Position& goal) {
  std::vector<Position> path = map_.shortest_path(v.position, goal);
  path.erase(path.begin());  // drop the current position
  double len = 0.0;
  Position prev = v.position;
  for (const Position& w : path) {
    len += std::abs(w.x - prev.x) + std::abs(w.y - prev.y);
    prev = w;
  }
  v.path = std::move(path);
  v.remaining_m = len;
}

// Drives a vacant vehicle through its plan: skips entries it already stands
// on or that went stale, performs due pickups, and otherwise starts motion
// toward the first remaining target.
void Simulation::activate(Vehicle& v, bool& trigger) {
  while (!v.occupied() && !v.plan.empty() && !v.moving()) {
    const PlanStep step = v.plan.front();
    if (step.kind == PlanStep::Kind::station) {
      const Position goal = state_.stations[step.station];
      if (same_point(v.position, goal)) {
        v.plan.erase(v.plan.begin());  // parked
        continue;
      }
      set_motion(v, goal);
      return;
    }
    auto it = std::find_if(state_.waiting.begin(), state_.waiting.end(),
                           [&](const CustomerRequest& r) { return r.id == step.customer_id; });
    if (it == state_.waiting.end()) {
      v.plan.erase(v.plan.begin());  // served by someone else or withdrawn
      continue;
    }
    if (same_point(v.position, it->origin)) {
      // pickup
      wait_sum_ += state_.clock - it->request_time;
      ++counts_.customers_served;
      v.passenger = it->id;
      v.dropoff = it->destination;
      state_.in_service.push_back(it->id);
      v.plan.erase(v.plan.begin());
      state_.waiting.erase(it);
      set_motion(v, v.dropoff);
      return;
    }
    set_motion(v, it->origin);
    return;
  }
  (void)trigger;
}

void Simulation::handle_arrivals_at_goal(bool& trigger) {
  for (Vehicle& v : state_.vehicles) {
    if (v.moving()) continue;
    if (v.occupied()) {
      // reached the passenger's destination
      if (!same_point(v.position, v.dropoff)) continue;
      const std::uint64_t done = *v.passenger;
      v.passenger.reset();
      v.dropoff = Position{};
      std::erase(state_.in_service, done);
      ++counts_.customers_completed;
      if (config_.redispatch_on_dropoff) trigger = true;
    }
    activate(v, trigger);
  }
}

void Simulation::inject_customer(const CustomerRequest& request) {
  state_.waiting.push_back(request);
  std::stable_sort(state_.waiting.begin(), state_.waiting.end(),
                   [](const CustomerRequest& a, const CustomerRequest& b) {
                     return a.request_time == b.request_time ? a.id < b.id
                                                             : a.request_time < b.request_time;
                   });
  ++counts_.customers_arrived;
}

Assignment Simulation::solve_round(const QuboRound& round, bool& ok) {
  SolverParams params = policy_.solver.params;
  params.seed = Rng::mix(Rng::mix(seed_, 0xD15C), round_counter_);
  SolveReport report;
  if (policy_.solver.method == SolverConfig::Method::sa) {
    report = solve_sa(round.problem, params);
  } else if (policy_.solver.schedule == AnnealSchedule::Kind::reverse) {
    const auto initial = greedy_initial_state(round.view, round.targets, round.problem, map_);
    report = solve_sqa(round.problem, AnnealSchedule::reverse(policy_.solver.s_min), params,
                       &initial);
  } else {
    report = solve_sqa(round.problem, AnnealSchedule::forward(), params);
  }

  // best feasible sample wins; ties resolved on the bits for determinism
  std::vector<std::size_t> order(report.samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (report.samples[a].energy != report.samples[b].energy)
      return report.samples[a].energy < report.samples[b].energy;
    return report.samples[a].bits < report.samples[b].bits;
  });
  for (std::size_t idx : order) {
    Assignment a = decode(round.problem, report.samples[idx].bits);
    if (a.feasible) {
      ok = true;
      return a;
    }
  }
  ok = false;
  return Assignment{};
}

void Simulation::apply_greedy_fallback() {
  Assignment g = dispatch_greedy(state_, map_);
  std::vector<std::uint64_t> ids;
  const int cap = std::min<int>(state_.num_vehicles(), static_cast<int>(state_.waiting.size()));
  ids.reserve(cap);
  for (int k = 0; k < cap; ++k) ids.push_back(state_.waiting[k].id);
  apply_assignment(g, ids);
}

void Simulation::dispatch() {
  ++counts_.dispatch_rounds;
  ++round_counter_;
  if (!policy_.uses_qubo()) {
    apply_greedy_fallback();
    return;
  }
  try {
    QuboRound round;
    const bool vrp = policy_.kind == PolicyKind::vrp;
    const std::size_t cap = vrp ? 2 * state_.vehicles.size() : state_.vehicles.size();
    round.view = truncate_waiting(state_, cap);
    if (vrp) {
      round.problem = build_vrp(round.view, policy_.weights, map_);
    } else {
      const TargetMode mode = policy_.kind == PolicyKind::proposed_dynamic
                                  ? TargetMode::dynamic_mode
                                  : TargetMode::static_mode;
      QuboWeights w = policy_.weights;
      if (policy_.kind == PolicyKind::proposed_no_ha1) w.enable_ha1 = false;
      round.targets = compute_targets(mode, round.view, demand_, stats_, round.view.stations, map_);
      round.problem = build_proposed(round.view, round.targets, w, map_);
    }
    round.customer_ids.reserve(round.view.waiting.size());
    for (const CustomerRequest& r : round.view.waiting) round.customer_ids.push_back(r.id);

    bool ok = false;
    Assignment a = solve_round(round, ok);
    if (!ok) {
      ++counts_.greedy_fallbacks;
      apply_greedy_fallback();
      return;
    }
    apply_assignment(a, round.customer_ids);
  } catch (const std::exception&) {
    ++counts_.greedy_fallbacks;
    apply_greedy_fallback();
  }
}

void Simulation::apply_assignment(const Assignment& assignment,
                                  const std::vector<std::uint64_t>& customer_ids) {
  if (assignment.plans.size() != state_.vehicles.size())
    throw std::invalid_argument("assignment does not cover the fleet");

  for (std::size_t i = 0; i < state_.vehicles.size(); ++i) {
    Vehicle& v = state_.vehicles[i];
    const VehiclePlan& plan = assignment.plans[i];

    std::vector<PlanStep> steps;
    for (int k : plan.customers) {
      if (k < 0 || k >= static_cast<int>(customer_ids.size()))
        throw std::runtime_error("assignment references an unknown customer");
      steps.push_back(PlanStep::for_customer(customer_ids[k]));
    }
    if (plan.station) {
      if (*plan.station < 0 || *plan.station >= state_.num_stations())
        throw std::runtime_error("assignment references an unknown station");
      steps.push_back(PlanStep::for_station(*plan.station));
    }

    // dispatch times are measured now, but only for slots whose target changed
    double t_cum = map_.travel_time(v.position, v.planning_destination());
    Position point = v.planning_destination();
    const bool at_station =
        std::any_of(state_.stations.begin(), state_.stations.end(),
                    [&](const Position& s) { return same_point(s, v.position); });
    for (std::size_t slot = 0; slot < steps.size(); ++slot) {
      const PlanStep& step = steps[slot];
      Position goal;
      if (step.kind == PlanStep::Kind::station) {
        goal = state_.stations[step.station];
      } else {
        auto it = std::find_if(state_.waiting.begin(), state_.waiting.end(),
                               [&](const CustomerRequest& r) { return r.id == step.customer_id; });
        if (it == state_.waiting.end())
          throw std::runtime_error("assignment references an unknown customer");
        goal = it->origin;
      }
      t_cum += map_.travel_time(point, goal);
      point = goal;
      if (slot < v.plan.size() && v.plan[slot] == step) continue;
      if (step.kind == PlanStep::Kind::station) {
        station_dispatch_sum_ += t_cum;
        ++counts_.station_dispatches;
        if (t_cum > 0.0) stats_.add_station_dispatch(t_cum, !v.occupied() && slot == 0);
      } else {
        customer_dispatch_sum_ += t_cum;
        ++counts_.customer_dispatches;
        if (t_cum > 0.0 && !v.occupied() && slot == 0 && at_station)
          stats_.add_customer_dispatch(t_cum);
      }
    }

    const bool first_same =
        !v.plan.empty() && !steps.empty() && v.plan.front() == steps.front();
    v.plan = std::move(steps);
    if (!v.occupied() && !(first_same && v.moving())) {
      v.path.clear();
      v.remaining_m = 0.0;
      bool ignored = false;
      activate(v, ignored);
    }
  }
}

void Simulation::sample_tick_metrics() {
  if (state_.num_vehicles() >= 2) {
    std::vector<Position> pos;
    pos.reserve(state_.vehicles.size());
    for (const Vehicle& v : state_.vehicles) pos.push_back(v.position);
    distance_sum_ += mean_pairwise_distance(map_, pos);
    ++counts_.distance_samples;
  }
  int occupied = 0;
  for (const Vehicle& v : state_.vehicles)
    if (v.occupied()) ++occupied;
  stats_.add_occupancy_sample(static_cast<double>(occupied) / state_.num_vehicles());
}

void Simulation::advance_to(double t) {
  const double dt = t - state_.clock;
  if (dt < -kEps) throw std::invalid_argument("cannot advance backwards");
  if (dt <= 0.0) return;
  waiting_integral_ += static_cast<double>(state_.waiting.size()) * dt;
  for (Vehicle& v : state_.vehicles) {
    double dist = map_.speed() * dt;
    while (dist > kEps && !v.path.empty()) {
      const Position& w = v.path.front();
      const double seg = std::abs(w.x - v.position.x) + std::abs(w.y - v.position.y);
      if (dist + kEps >= seg) {
        v.position = w;
        v.path.erase(v.path.begin());
        v.remaining_m = std::max(0.0, v.remaining_m - seg);
        v.odometer_m += seg;
        dist -= seg;
      } else {
        const double dx = w.x - v.position.x;
        const double dy = w.y - v.position.y;
        if (std::abs(dx) > kEps)
          v.position.x += (dx > 0 ? 1.0 : -1.0) * dist;
        else
          v.position.y += (dy > 0 ? 1.0 : -1.0) * dist;
        v.remaining_m = std::max(0.0, v.remaining_m - dist);
        v.odometer_m += dist;
        dist = 0.0;
      }
    }
    if (v.path.empty()) v.remaining_m = 0.0;
  }
  state_.clock = t;
}

TrialMetrics Simulation::snapshot_metrics() const {
  TrialMetrics m = counts_;
  m.mean_wait_s = counts_.customers_served ? wait_sum_ / counts_.customers_served : 0.0;
  m.mean_num_waiting = state_.clock > 0.0 ? waiting_integral_ / state_.clock : 0.0;
  m.mean_customer_dispatch_s =
      counts_.customer_dispatches ? customer_dispatch_sum_ / counts_.customer_dispatches : 0.0;
  m.mean_station_dispatch_s =
      counts_.station_dispatches ? station_dispatch_sum_ / counts_.station_dispatches : 0.0;
  m.mean_inter_vehicle_distance_m =
      counts_.distance_samples ? distance_sum_ / counts_.distance_samples : 0.0;
  double odo = 0.0;
  for (const Vehicle& v : state_.vehicles) odo += v.odometer_m;
  m.total_travel_km = odo / 1000.0;
  return m;
}

TrialMetrics Simulation::run() {
  const double duration = config_.duration_s;
  // t = 0: first metric snapshot, then the initial fleet allocation
  sample_tick_metrics();
  next_tick_ = config_.metric_sample_dt;
  dispatch();
  while (state_.clock < duration - kEps) {
    double t_next = duration;
    if (next_arrival_ < arrivals_.size())
      t_next = std::min(t_next, arrivals_[next_arrival_].request_time);
    for (const Vehicle& v : state_.vehicles)
      if (v.moving()) t_next = std::min(t_next, state_.clock + v.remaining_m / map_.speed());
    t_next = std::min(t_next, next_tick_);
    t_next = std::max(t_next, state_.clock);

    advance_to(t_next);

    bool trigger = false;
    handle_arrivals_at_goal(trigger);
    while (next_arrival_ < arrivals_.size() &&
           arrivals_[next_arrival_].request_time <= state_.clock + kEps) {
      inject_customer(arrivals_[next_arrival_]);
      ++next_arrival_;
      trigger = true;
    }
    if (state_.clock + kEps >= next_tick_) {
      sample_tick_metrics();
      next_tick_ += config_.metric_sample_dt;
    }
    if (trigger) dispatch();
  }
  return snapshot_metrics();
}

}  // namespace mmdp
