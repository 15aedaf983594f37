#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "demand.hpp"
#include "grid.hpp"
#include "qubo.hpp"
#include "solver.hpp"
#include "state.hpp"
#include "targets.hpp"

namespace mmdp {

enum class PolicyKind { greedy, proposed_static, proposed_dynamic, proposed_no_ha1, vrp };

PolicyKind policy_kind_from_name(const std::string& name);
std::string policy_name(PolicyKind kind);

struct SolverConfig {
  enum class Method { sqa, sa };
  Method method = Method::sqa;
  SolverParams params;
  AnnealSchedule::Kind schedule = AnnealSchedule::Kind::forward;
  double s_min = 0.4;
};

struct Policy {
  PolicyKind kind = PolicyKind::greedy;
  QuboWeights weights;
  SolverConfig solver;

  bool uses_qubo() const { return kind != PolicyKind::greedy; }
};

struct SimConfig {
  double duration_s = 10000.0;
  bool redispatch_on_dropoff = true;
  double metric_sample_dt = 1.0;
};

/// Aggregates of one simulated trial. Means cover completed measurements
/// only; a zero count leaves the corresponding mean at zero.
struct TrialMetrics {
  double mean_wait_s = 0.0;
  double mean_num_waiting = 0.0;
  double mean_customer_dispatch_s = 0.0;
  double mean_station_dispatch_s = 0.0;
  double mean_inter_vehicle_distance_m = 0.0;
  double total_travel_km = 0.0;

  std::uint64_t customers_arrived = 0;
  std::uint64_t customers_served = 0;     // picked up (wait-time samples)
  std::uint64_t customers_completed = 0;  // dropped off
  std::uint64_t customer_dispatches = 0;
  std::uint64_t station_dispatches = 0;
  std::uint64_t distance_samples = 0;
  std::uint64_t dispatch_rounds = 0;
  std::uint64_t greedy_fallbacks = 0;
};

/// Longest-waiting customers take the vehicle with the shortest
/// via-destination travel time; surplus vehicles head to their nearest
/// station. Customer indices refer to the waiting list; at most one customer
/// per vehicle.
Assignment dispatch_greedy(const WorldState& state, const GridMap& map);

/// Deterministic discrete-event fleet simulation of one trial. Dispatch runs
/// on every customer arrival and, if configured, on every drop-off.
class Simulation {
 public:
  Simulation(const GridMap& map, const DemandModel& demand, std::vector<Position> stations,
             std::vector<Position> vehicle_positions, const Policy& policy,
             const SimConfig& config, std::uint64_t seed);

  TrialMetrics run();

  // stepping pieces, exposed for tests
  WorldState& state() { return state_; }
  const OperationalStats& stats() const { return stats_; }
  TrialMetrics snapshot_metrics() const;
  void inject_customer(const CustomerRequest& request);
  void dispatch();
  void advance_to(double t);
  void handle_goals(bool& trigger) { handle_arrivals_at_goal(trigger); }

  /// Applies one decoded assignment; customer indices in the plans refer to
  /// customer_ids. Dispatch metrics are recorded only for plan slots that
  /// changed. Throws on unknown station or customer references.
  void apply_assignment(const Assignment& assignment,
                        const std::vector<std::uint64_t>& customer_ids);

 private:
  struct QuboRound {
    QuboProblem problem;
    StationTargets targets;
    std::vector<std::uint64_t> customer_ids;
    WorldState view;
  };

  void set_motion(Vehicle& v, const Position& goal);
  void activate(Vehicle& v, bool& trigger);
  void handle_arrivals_at_goal(bool& trigger);
  Assignment solve_round(const QuboRound& round, bool& ok);
  void apply_greedy_fallback();
  void sample_tick_metrics();

  const GridMap& map_;
  const DemandModel& demand_;
  Policy policy_;
  SimConfig config_;
  std::uint64_t seed_;

  WorldState state_;
  OperationalStats stats_;
  std::vector<CustomerRequest> arrivals_;
  std::size_t next_arrival_ = 0;
  double next_tick_ = 0.0;
  std::uint64_t round_counter_ = 0;

  // metric accumulators
  double wait_sum_ = 0.0;
  double waiting_integral_ = 0.0;
  double customer_dispatch_sum_ = 0.0;
  double station_dispatch_sum_ = 0.0;
  double distance_sum_ = 0.0;
  TrialMetrics counts_;
};

}  // namespace mmdp
