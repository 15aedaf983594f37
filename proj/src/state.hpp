#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "demand.hpp"
#include "grid.hpp"

namespace mmdp {

struct PlanStep {
  enum class Kind { customer, station };
  Kind kind = Kind::station;
  std::uint64_t customer_id = 0;  // valid when kind == customer
  int station = -1;               // valid when kind == station

  static PlanStep for_customer(std::uint64_t id) {
    return PlanStep{Kind::customer, id, -1};
  }
  static PlanStep for_station(int j) { return PlanStep{Kind::station, 0, j}; }

  bool operator==(const PlanStep& o) const {
    return kind == o.kind && (kind == Kind::customer ? customer_id == o.customer_id
                                                     : station == o.station);
  }
};

struct Vehicle {
  int id = 0;
  Position position{};
  Position dropoff{};  // current passenger's destination, valid while occupied
  std::optional<std::uint64_t> passenger;
  std::vector<PlanStep> plan;  // targets after the current trip (occupied) or now (vacant)

  // motion along the street graph
  std::vector<Position> path;  // remaining waypoints, back() is the motion goal
  double remaining_m = 0.0;
  double odometer_m = 0.0;

  bool occupied() const { return passenger.has_value(); }
  bool moving() const { return remaining_m > 1e-9; }

  /// Where the vehicle will next be free: the passenger's destination while
  /// occupied, its own position otherwise.
  Position planning_destination() const { return occupied() ? dropoff : position; }
};

struct WorldState {
  double clock = 0.0;
  std::vector<Vehicle> vehicles;
  std::vector<Position> stations;
  std::vector<CustomerRequest> waiting;   // sorted by request_time
  std::vector<std::uint64_t> in_service;  // customers aboard vehicles

  int num_vehicles() const { return static_cast<int>(vehicles.size()); }
  int num_stations() const { return static_cast<int>(stations.size()); }
};

/// Copy of the state whose waiting list keeps only the cap earliest requests.
inline WorldState truncate_waiting(const WorldState& state, std::size_t cap) {
  WorldState s = state;
  if (s.waiting.size() > cap) s.waiting.resize(cap);
  return s;
}

}  // namespace mmdp
