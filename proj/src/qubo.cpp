#include "qubo.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace mmdp {

using nlohmann::json;

VarMap::VarRef VarMap::describe(int var) const {
  if (var < 0 || var >= num_vars()) throw std::out_of_range("variable id out of range");
  const int station_block = num_vehicles * num_stations;
  if (var < station_block)
    return VarRef{VarRef::Kind::station, var / num_stations, var % num_stations, 1};
  int rest = var - station_block;
  const int block = num_vehicles * num_customers;
  const int slot = rest / block + 1;
  rest %= block;
  return VarRef{VarRef::Kind::customer, rest / num_customers, rest % num_customers, slot};
}

QuboProblem::QuboProblem(VarMap varmap) : varmap_(varmap) {
  n_vars_ = varmap_.num_vars();
  linear_.assign(n_vars_, 0.0);
}

void QuboProblem::add_linear(int i, double c) {
  if (i < 0 || i >= n_vars_) throw std::out_of_range("variable id out of range");
  linear_[i] += c;
}

void QuboProblem::add_quadratic(int i, int j, double c) {
  if (i == j) throw std::invalid_argument("quadratic term needs two distinct variables");
  if (i < 0 || j < 0 || i >= n_vars_ || j >= n_vars_)
    throw std::out_of_range("variable id out of range");
  if (i > j) std::swap(i, j);
  quadratic_[{i, j}] += c;
}

double QuboProblem::energy(std::span<const std::uint8_t> bits) const {
  if (static_cast<int>(bits.size()) != n_vars_)
    throw std::invalid_argument("bitstring length does not match the problem");
  double e = offset_;
  for (int i = 0; i < n_vars_; ++i)
    if (bits[i]) e += linear_[i];
  for (const auto& [ij, c] : quadratic_)
    if (bits[ij.first] && bits[ij.second]) e += c;
  return e;
}

double energy(const QuboProblem& problem, std::span<const std::uint8_t> bits) {
  return problem.energy(bits);
}

std::string QuboProblem::to_json() const {
  json j;
  j["n_vars"] = n_vars_;
  j["offset"] = offset_;
  j["linear"] = linear_;
  json quad = json::array();
  for (const auto& [ij, c] : quadratic_) quad.push_back(json::array({ij.first, ij.second, c}));
  j["quadratic"] = std::move(quad);
  json vm;
  vm["formulation"] = varmap_.formulation == Formulation::vrp ? "vrp" : "proposed";
  vm["vehicles"] = varmap_.num_vehicles;
  vm["stations"] = varmap_.num_stations;
  vm["customers"] = varmap_.num_customers;
  vm["ha1"] = varmap_.ha1_enabled;
  vm["hb1"] = varmap_.hb1_enabled;
  j["varmap"] = std::move(vm);
  return j.dump(2);
}

QuboProblem QuboProblem::from_json(const std::string& text) {
  json j = json::parse(text);
  VarMap vm;
  const auto& jm = j.at("varmap");
  const std::string kind = jm.at("formulation").get<std::string>();
  if (kind == "proposed")
    vm.formulation = Formulation::proposed;
  else if (kind == "vrp")
    vm.formulation = Formulation::vrp;
  else
    throw std::invalid_argument("unknown formulation: " + kind);
  vm.num_vehicles = jm.at("vehicles").get<int>();
  vm.num_stations = jm.at("stations").get<int>();
  vm.num_customers = jm.at("customers").get<int>();
  vm.ha1_enabled = jm.value("ha1", true);
  vm.hb1_enabled = jm.value("hb1", true);
  QuboProblem p(vm);
  if (j.at("n_vars").get<int>() != p.num_vars())
    throw std::invalid_argument("n_vars does not match the variable map");
  p.offset_ = j.at("offset").get<double>();
  p.linear_ = j.at("linear").get<std::vector<double>>();
  if (static_cast<int>(p.linear_.size()) != p.n_vars_)
    throw std::invalid_argument("linear coefficient count mismatch");
  for (const auto& row : j.at("quadratic")) {
    if (!row.is_array() || row.size() != 3)
      throw std::invalid_argument("quadratic rows must be [i, j, value]");
    p.add_quadratic(row[0].get<int>(), row[1].get<int>(), row[2].get<double>());
  }
  return p;
}

namespace {

// (a - sum_i b_i)^2 expanded into offset / linear / pairwise terms, scaled.
void add_squared_deficit(QuboProblem& p, double a, std::span<const int> vars, double scale) {
  p.add_offset(scale * a * a);
  for (std::size_t i = 0; i < vars.size(); ++i) {
    p.add_linear(vars[i], scale * (1.0 - 2.0 * a));
    for (std::size_t j = i + 1; j < vars.size(); ++j)
      p.add_quadratic(vars[i], vars[j], scale * 2.0);
  }
}

int capped_customers(const WorldState& state, int cap, const char* what) {
  const int n_c = static_cast<int>(state.waiting.size());
  if (n_c > cap) throw std::invalid_argument(std::string(what) + ": too many waiting customers; truncate first");
  return n_c;
}

}  // namespace

QuboProblem build_proposed(const WorldState& state, const StationTargets& targets,
                           const QuboWeights& weights, const GridMap& map) {
  const int n = state.num_vehicles();
  const int n_s = state.num_stations();
  const int n_c = capped_customers(state, n, "single-step formulation");
  if (n == 0 || n_s == 0) throw std::invalid_argument("need at least one vehicle and one station");
  if (static_cast<int>(targets.tau.size()) != n_s)
    throw std::invalid_argument("targets do not match the station list");

  VarMap vm;
  vm.formulation = Formulation::proposed;
  vm.num_vehicles = n;
  vm.num_stations = n_s;
  vm.num_customers = n_c;
  vm.ha1_enabled = weights.enable_ha1;
  vm.hb1_enabled = weights.enable_hb1;
  QuboProblem p(vm);

  // travel times to every target, via the current trip destination
  std::vector<double> t_station(n * n_s), t_customer(n * n_c);
  double t_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vehicle& v = state.vehicles[i];
    const Position from = v.position;
    const Position via = v.planning_destination();
    for (int j = 0; j < n_s; ++j) {
      t_station[i * n_s + j] = map.travel_time_via(from, via, state.stations[j]);
      t_sum += t_station[i * n_s + j];
    }
    for (int k = 0; k < n_c; ++k) {
      t_customer[i * n_c + k] = map.travel_time_via(from, via, state.waiting[k].origin);
      t_sum += t_customer[i * n_c + k];
    }
  }
  double t_avg = t_sum / (static_cast<double>(n) * (n_s + n_c));
  if (t_avg <= 0.0) t_avg = 1.0;  // all coefficients vanish anyway

  // one target per vehicle
  std::vector<int> vars;
  for (int i = 0; i < n; ++i) {
    vars.clear();
    for (int j = 0; j < n_s; ++j) vars.push_back(vm.station_var(i, j));
    for (int k = 0; k < n_c; ++k) vars.push_back(vm.customer_var(i, k));
    add_squared_deficit(p, 1.0, vars, 1.0);
  }

  // one vehicle per customer
  if (weights.enable_ha1) {
    for (int k = 0; k < n_c; ++k) {
      vars.clear();
      for (int i = 0; i < n; ++i) vars.push_back(vm.customer_var(i, k));
      add_squared_deficit(p, 1.0, vars, 1.0);
    }
  }

  // normalized travel cost
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n_s; ++j)
      p.add_linear(vm.station_var(i, j), weights.b0 * t_station[i * n_s + j] / t_avg);
    for (int k = 0; k < n_c; ++k)
      p.add_linear(vm.customer_var(i, k), weights.b0 * t_customer[i * n_c + k] / t_avg);
  }

  // station occupancy pulled toward tau
  if (weights.enable_hb1) {
    for (int j = 0; j < n_s; ++j) {
      vars.clear();
      for (int i = 0; i < n; ++i) vars.push_back(vm.station_var(i, j));
      add_squared_deficit(p, targets.tau[j], vars, weights.b1);
    }
  }
  return p;
}

QuboProblem build_vrp(const WorldState& state, const QuboWeights& weights, const GridMap& map) {
  const int n = state.num_vehicles();
  const int n_s = state.num_stations();
  const int n_c = capped_customers(state, 2 * n, "two-step formulation");
  if (n == 0 || n_s == 0) throw std::invalid_argument("need at least one vehicle and one station");

  VarMap vm;
  vm.formulation = Formulation::vrp;
  vm.num_vehicles = n;
  vm.num_stations = n_s;
  vm.num_customers = n_c;
  QuboProblem p(vm);

  // chain travel times from the vehicle's free point
  const auto leg = [&](const Position& a, const Position& b) { return map.travel_time(a, b); };
  std::vector<double> head(n);           // current position -> free point
  std::vector<Position> free_point(n);
  for (int i = 0; i < n; ++i) {
    const Vehicle& v = state.vehicles[i];
    free_point[i] = v.planning_destination();
    head[i] = leg(v.position, free_point[i]);
  }

  // every customer served exactly once, in either slot of any vehicle
  std::vector<int> vars;
  for (int k = 0; k < n_c; ++k) {
    vars.clear();
    for (int i = 0; i < n; ++i) {
      vars.push_back(vm.customer_var(i, k, 1));
      vars.push_back(vm.customer_var(i, k, 2));
    }
    add_squared_deficit(p, 1.0, vars, 1.0);
  }

  // fill the first slots up to min(N, n_c)
  const int n_first = std::min(n, n_c);
  vars.clear();
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n_c; ++k) vars.push_back(vm.customer_var(i, k, 1));
  add_squared_deficit(p, static_cast<double>(n_first), vars, 1.0);

  // route-pattern coupling: a vehicle either takes a station (with at most a
  // first-slot customer) or serves two customers; stations exclude slot two.
  for (int i = 0; i < n; ++i) {
    p.add_offset(weights.a2 * 2.0);
    for (int j = 0; j < n_s; ++j) p.add_linear(vm.station_var(i, j), weights.a2 * -2.0);
    for (int k = 0; k < n_c; ++k)
      for (int t = 1; t <= 2; ++t) p.add_linear(vm.customer_var(i, k, t), weights.a2 * -1.0);
    for (int j = 0; j < n_s; ++j)
      for (int k = 0; k < n_c; ++k)
        for (int t = 1; t <= 2; ++t)
          p.add_quadratic(vm.station_var(i, j), vm.customer_var(i, k, t), weights.a2);
    for (int j = 0; j < n_s; ++j)
      for (int k = 0; k < n_c; ++k)
        p.add_quadratic(vm.station_var(i, j), vm.customer_var(i, k, 2), weights.a2);
  }

  // no duplicate stations or same-slot customers on one vehicle
  for (int i = 0; i < n; ++i) {
    for (int j1 = 0; j1 < n_s; ++j1)
      for (int j2 = j1 + 1; j2 < n_s; ++j2)
        p.add_quadratic(vm.station_var(i, j1), vm.station_var(i, j2), 1.0);
    for (int t = 1; t <= 2; ++t)
      for (int k1 = 0; k1 < n_c; ++k1)
        for (int k2 = k1 + 1; k2 < n_c; ++k2)
          p.add_quadratic(vm.customer_var(i, k1, t), vm.customer_var(i, k2, t), 1.0);
  }

  // travel cost of the three route patterns
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n_s; ++j) {
      const double direct = head[i] + leg(free_point[i], state.stations[j]);
      p.add_linear(vm.station_var(i, j), weights.b_vrp * direct);
      for (int k = 0; k < n_c; ++k) {
        // station after serving the first customer; the direct pattern is
        // cancelled by the pairing below
        const double via_c = head[i] + leg(free_point[i], state.waiting[k].origin) +
                             leg(state.waiting[k].origin, state.stations[j]);
        p.add_quadratic(vm.station_var(i, j), vm.customer_var(i, k, 1),
                        weights.b_vrp * (via_c - direct));
      }
    }
    for (int k1 = 0; k1 < n_c; ++k1)
      for (int k2 = 0; k2 < n_c; ++k2) {
        const double via = head[i] + leg(free_point[i], state.waiting[k1].origin) +
                           leg(state.waiting[k1].origin, state.waiting[k2].origin);
        p.add_quadratic(vm.customer_var(i, k1, 1), vm.customer_var(i, k2, 2),
                        weights.b_vrp * via);
      }
  }
  return p;
}

namespace {

void check_bits(const QuboProblem& problem, std::span<const std::uint8_t> bits) {
  if (static_cast<int>(bits.size()) != problem.num_vars())
    throw std::invalid_argument("bitstring length does not match the problem");
}

Assignment decode_proposed(const QuboProblem& problem, std::span<const std::uint8_t> bits) {
  const VarMap& vm = problem.varmap();
  Assignment a;
  a.plans.resize(vm.num_vehicles);
  std::vector<int> customer_count(vm.num_customers, 0);
  for (int i = 0; i < vm.num_vehicles; ++i) {
    int n_targets = 0;
    for (int j = 0; j < vm.num_stations; ++j)
      if (bits[vm.station_var(i, j)]) {
        ++n_targets;
        a.plans[i].station = j;
      }
    for (int k = 0; k < vm.num_customers; ++k)
      if (bits[vm.customer_var(i, k)]) {
        ++n_targets;
        a.plans[i].customers.push_back(k);
        ++customer_count[k];
      }
    if (n_targets == 0)
      a.violations.push_back("vehicle " + std::to_string(i) + " has no target");
    else if (n_targets > 1)
      a.violations.push_back("vehicle " + std::to_string(i) + " has multiple targets");
  }
  if (vm.ha1_enabled) {
    for (int k = 0; k < vm.num_customers; ++k) {
      if (customer_count[k] == 0)
        a.violations.push_back("customer " + std::to_string(k) + " unserved");
      else if (customer_count[k] > 1)
        a.violations.push_back("customer " + std::to_string(k) + " assigned to multiple vehicles");
    }
  }
  a.feasible = a.violations.empty();
  return a;
}

Assignment decode_vrp(const QuboProblem& problem, std::span<const std::uint8_t> bits) {
  const VarMap& vm = problem.varmap();
  Assignment a;
  a.plans.resize(vm.num_vehicles);
  std::vector<int> customer_count(vm.num_customers, 0);
  int first_slot_total = 0;
  for (int i = 0; i < vm.num_vehicles; ++i) {
    std::vector<int> stations, slot1, slot2;
    for (int j = 0; j < vm.num_stations; ++j)
      if (bits[vm.station_var(i, j)]) stations.push_back(j);
    for (int k = 0; k < vm.num_customers; ++k) {
      if (bits[vm.customer_var(i, k, 1)]) {
        slot1.push_back(k);
        ++customer_count[k];
      }
      if (bits[vm.customer_var(i, k, 2)]) {
        slot2.push_back(k);
        ++customer_count[k];
      }
    }
    first_slot_total += static_cast<int>(slot1.size());
    const std::string v = "vehicle " + std::to_string(i);
    if (stations.size() > 1) a.violations.push_back(v + " has multiple stations");
    if (slot1.size() > 1) a.violations.push_back(v + " has multiple first-slot customers");
    if (slot2.size() > 1) a.violations.push_back(v + " has multiple second-slot customers");
    if (!stations.empty() && !slot2.empty())
      a.violations.push_back(v + " has a station together with a second-slot customer");
    if (stations.empty() && slot1.size() + slot2.size() != 2)
      a.violations.push_back(v + " has no station and no full two-customer route");
    for (int k : slot1) a.plans[i].customers.push_back(k);
    for (int k : slot2) a.plans[i].customers.push_back(k);
    if (!stations.empty()) a.plans[i].station = stations.front();
  }
  for (int k = 0; k < vm.num_customers; ++k) {
    if (customer_count[k] == 0)
      a.violations.push_back("customer " + std::to_string(k) + " unserved");
    else if (customer_count[k] > 1)
      a.violations.push_back("customer " + std::to_string(k) + " served more than once");
  }
  const int n_first = std::min(vm.num_vehicles, vm.num_customers);
  if (first_slot_total != n_first)
    a.violations.push_back("first-slot count " + std::to_string(first_slot_total) +
                           " differs from target " + std::to_string(n_first));
  a.feasible = a.violations.empty();
  return a;
}

}  // namespace

Assignment decode(const QuboProblem& problem, std::span<const std::uint8_t> bits) {
  check_bits(problem, bits);
  return problem.varmap().formulation == Formulation::vrp ? decode_vrp(problem, bits)
                                                          : decode_proposed(problem, bits);
}

}  // namespace mmdp
