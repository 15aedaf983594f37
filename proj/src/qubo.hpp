#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "state.hpp"
#include "targets.hpp"

namespace mmdp {

enum class Formulation { proposed, vrp };

/// Penalty and cost weights. Hard one-target / one-vehicle penalties carry
/// unit weight; b0/b1 scale the travel-cost and station-target terms of the
/// single-step formulation, a2/b_vrp their counterparts in the two-step
/// routing formulation.
struct QuboWeights {
  double b0 = 0.1;
  double b1 = 0.3;
  double a2 = 1.0 / 3.0;
  double b_vrp = 0.001;
  bool enable_ha1 = true;  // every customer gets exactly one vehicle
  bool enable_hb1 = true;  // station counts pulled toward tau
};

/// Bijection between flat variable ids and (vehicle, target[, slot]) triples.
/// Layout: vehicle-station block first, then vehicle-customer blocks (one per
/// slot for the two-step formulation).
struct VarMap {
  Formulation formulation = Formulation::proposed;
  int num_vehicles = 0;
  int num_stations = 0;
  int num_customers = 0;
  bool ha1_enabled = true;
  bool hb1_enabled = true;

  int num_vars() const {
    const int slots = formulation == Formulation::vrp ? 2 : 1;
    return num_vehicles * num_stations + slots * num_vehicles * num_customers;
  }
  int station_var(int vehicle, int station) const {
    return vehicle * num_stations + station;
  }
  int customer_var(int vehicle, int customer, int slot = 1) const {
    return num_vehicles * num_stations + (slot - 1) * num_vehicles * num_customers +
           vehicle * num_customers + customer;
  }

  struct VarRef {
    enum class Kind { station, customer } kind;
    int vehicle;
    int target;
    int slot;  // 1 or 2; 1 for the single-step formulation
  };
  VarRef describe(int var) const;
};

/// Upper-triangular sparse quadratic form over binary variables:
/// energy(b) = offset + sum_i linear[i] b_i + sum_{i<j} quadratic[i][j] b_i b_j.
class QuboProblem {
 public:
  QuboProblem() = default;
  explicit QuboProblem(VarMap varmap);

  int num_vars() const { return n_vars_; }
  double offset() const { return offset_; }
  const std::vector<double>& linear() const { return linear_; }
  const std::map<std::pair<int, int>, double>& quadratic() const { return quadratic_; }
  const VarMap& varmap() const { return varmap_; }

  void add_offset(double c) { offset_ += c; }
  void add_linear(int i, double c);
  void add_quadratic(int i, int j, double c);  // i != j, folded to i < j

  double energy(std::span<const std::uint8_t> bits) const;

  std::string to_json() const;
  static QuboProblem from_json(const std::string& text);

 private:
  int n_vars_ = 0;
  double offset_ = 0.0;
  std::vector<double> linear_;
  std::map<std::pair<int, int>, double> quadratic_;
  VarMap varmap_;
};

/// One vehicle's decoded route: customers in service order, then optionally a
/// station.
struct VehiclePlan {
  std::vector<int> customers;  // indices into the problem's customer list
  std::optional<int> station;
};

struct Assignment {
  std::vector<VehiclePlan> plans;
  std::vector<std::string> violations;
  bool feasible = false;
};

/// Single-step dispatch formulation: every vehicle takes exactly one station
/// or customer, every customer exactly one vehicle, travel cost normalized by
/// the mean coefficient, and station counts pulled toward tau.
QuboProblem build_proposed(const WorldState& state, const StationTargets& targets,
                           const QuboWeights& weights, const GridMap& map);

/// Two-step routing formulation: each vehicle either goes straight to a
/// station, serves one customer then a station, or serves two customers.
QuboProblem build_vrp(const WorldState& state, const QuboWeights& weights, const GridMap& map);

double energy(const QuboProblem& problem, std::span<const std::uint8_t> bits);

/// Maps set bits to per-vehicle plans and reports every constraint violation;
/// violations are empty exactly when the problem's active hard constraints
/// all evaluate to zero on these bits.
Assignment decode(const QuboProblem& problem, std::span<const std::uint8_t> bits);

}  // namespace mmdp
