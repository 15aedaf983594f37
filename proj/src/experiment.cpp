#include "experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "solver.hpp"

namespace mmdp {

using nlohmann::json;

namespace {

std::vector<std::pair<double, double>> parse_rc_pairs(const json& arr, const char* what) {
  std::vector<std::pair<double, double>> out;
  if (!arr.is_array()) throw ConfigError(std::string(what) + " must be an array of [row, col] pairs");
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 2)
      throw ConfigError(std::string(what) + " entries must be [row, col] pairs");
    out.push_back({e[0].get<double>(), e[1].get<double>()});
  }
  return out;
}

std::vector<std::pair<int, int>> parse_cells(const json& arr, const char* what) {
  std::vector<std::pair<int, int>> out;
  for (const auto& [r, c] : parse_rc_pairs(arr, what)) {
    if (r != std::floor(r) || c != std::floor(c))
      throw ConfigError(std::string(what) + " entries must be integer [row, col] pairs");
    out.push_back({static_cast<int>(r), static_cast<int>(c)});
  }
  return out;
}

json rc_pairs_to_json(const std::vector<std::pair<double, double>>& v) {
  json arr = json::array();
  for (const auto& [r, c] : v) arr.push_back(json::array({r, c}));
  return arr;
}

json cells_to_json(const std::vector<std::pair<int, int>>& v) {
  json arr = json::array();
  for (const auto& [r, c] : v) arr.push_back(json::array({r, c}));
  return arr;
}

double num_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError(std::string(key) + " must be a number");
  return j.at(key).get<double>();
}

int int_or(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
  return j.at(key).get<int>();
}

bool bool_or(const json& j, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) throw ConfigError(std::string(key) + " must be a boolean");
  return j.at(key).get<bool>();
}

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");
  ExperimentConfig c;
  try {
    if (j.contains("map")) {
      const json& m = j.at("map");
      c.map.rows = int_or(m, "rows", c.map.rows);
      c.map.cols = int_or(m, "cols", c.map.cols);
      c.map.cell_size_m = num_or(m, "cell_size_m", c.map.cell_size_m);
      c.map.speed_mps = num_or(m, "speed_mps", c.map.speed_mps);
    }
    if (j.contains("stations")) c.stations = parse_rc_pairs(j.at("stations"), "stations");
    if (j.contains("vehicles")) {
      const json& v = j.at("vehicles");
      c.vehicle_count = int_or(v, "count", c.vehicle_count);
      if (v.contains("initial_positions"))
        c.vehicle_positions = parse_rc_pairs(v.at("initial_positions"), "initial_positions");
    }
    if (j.contains("demand")) {
      const json& d = j.at("demand");
      c.demand.request_interval_s = num_or(d, "request_interval_s", c.demand.request_interval_s);
      if (d.contains("hot_origin_cells"))
        c.demand.hot_origin_cells = parse_cells(d.at("hot_origin_cells"), "hot_origin_cells");
      if (d.contains("hot_dest_cells"))
        c.demand.hot_dest_cells = parse_cells(d.at("hot_dest_cells"), "hot_dest_cells");
      c.demand.hot_multiplier = num_or(d, "hot_multiplier", c.demand.hot_multiplier);
      if (d.contains("origin_weights"))
        c.demand.origin_weights = d.at("origin_weights").get<std::vector<double>>();
      if (d.contains("dest_weights"))
        c.demand.dest_weights = d.at("dest_weights").get<std::vector<double>>();
    }
    if (j.contains("policies")) {
      c.policies = j.at("policies").get<std::vector<std::string>>();
    }
    if (j.contains("weights")) {
      const json& w = j.at("weights");
      c.weights.b0 = num_or(w, "b0", c.weights.b0);
      c.weights.b1 = num_or(w, "b1", c.weights.b1);
      c.weights.a2 = num_or(w, "a2", c.weights.a2);
      c.weights.b_vrp = num_or(w, "b_vrp", c.weights.b_vrp);
      c.weights.enable_ha1 = bool_or(w, "enable_ha1", c.weights.enable_ha1);
      c.weights.enable_hb1 = bool_or(w, "enable_hb1", c.weights.enable_hb1);
    }
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      if (s.contains("method")) {
        const std::string m = s.at("method").get<std::string>();
        if (m == "sqa")
          c.solver.method = SolverConfig::Method::sqa;
        else if (m == "sa")
          c.solver.method = SolverConfig::Method::sa;
        else
          throw ConfigError("solver.method must be 'sqa' or 'sa'");
      }
      c.solver.params.reads = int_or(s, "reads", c.solver.params.reads);
      c.solver.params.sweeps = int_or(s, "sweeps", c.solver.params.sweeps);
      c.solver.params.replicas = int_or(s, "replicas", c.solver.params.replicas);
      c.solver.params.beta = num_or(s, "beta", c.solver.params.beta);
      c.solver.params.gamma0 = num_or(s, "gamma0", c.solver.params.gamma0);
      c.solver.params.sa_t_hot = num_or(s, "sa_t_hot", c.solver.params.sa_t_hot);
      c.solver.params.sa_t_cold = num_or(s, "sa_t_cold", c.solver.params.sa_t_cold);
      c.solver.params.include_initial =
          bool_or(s, "include_initial", c.solver.params.include_initial);
      if (s.contains("schedule")) {
        const std::string k = s.at("schedule").get<std::string>();
        if (k == "forward")
          c.solver.schedule = AnnealSchedule::Kind::forward;
        else if (k == "reverse")
          c.solver.schedule = AnnealSchedule::Kind::reverse;
        else
          throw ConfigError("solver.schedule must be 'forward' or 'reverse'");
      }
      c.solver.s_min = num_or(s, "s_min", c.solver.s_min);
    }
    if (j.contains("sim")) {
      const json& s = j.at("sim");
      c.trials = int_or(s, "trials", c.trials);
      c.sim.duration_s = num_or(s, "duration_s", c.sim.duration_s);
      c.sim.redispatch_on_dropoff = bool_or(s, "redispatch_on_dropoff", c.sim.redispatch_on_dropoff);
      c.sim.metric_sample_dt = num_or(s, "metric_sample_dt", c.sim.metric_sample_dt);
    }
    if (j.contains("sweep_smin")) {
      const json& s = j.at("sweep_smin");
      c.sweep_smin.instance_vehicles = int_or(s, "instance_vehicles", c.sweep_smin.instance_vehicles);
      c.sweep_smin.instance_customers =
          int_or(s, "instance_customers", c.sweep_smin.instance_customers);
      c.sweep_smin.ramp_fraction = num_or(s, "ramp_fraction", c.sweep_smin.ramp_fraction);
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string ExperimentConfig::to_json_text() const {
  json j;
  j["map"] = {{"rows", map.rows},
              {"cols", map.cols},
              {"cell_size_m", map.cell_size_m},
              {"speed_mps", map.speed_mps}};
  j["stations"] = rc_pairs_to_json(stations);
  j["vehicles"] = {{"count", vehicle_count},
                   {"initial_positions", rc_pairs_to_json(vehicle_positions)}};
  j["demand"] = {{"request_interval_s", demand.request_interval_s},
                 {"hot_origin_cells", cells_to_json(demand.hot_origin_cells)},
                 {"hot_dest_cells", cells_to_json(demand.hot_dest_cells)},
                 {"hot_multiplier", demand.hot_multiplier},
                 {"origin_weights", demand.origin_weights},
                 {"dest_weights", demand.dest_weights}};
  j["policies"] = policies;
  j["weights"] = {{"b0", weights.b0},
                  {"b1", weights.b1},
                  {"a2", weights.a2},
                  {"b_vrp", weights.b_vrp},
                  {"enable_ha1", weights.enable_ha1},
                  {"enable_hb1", weights.enable_hb1}};
  j["solver"] = {{"method", solver.method == SolverConfig::Method::sa ? "sa" : "sqa"},
                 {"reads", solver.params.reads},
                 {"sweeps", solver.params.sweeps},
                 {"replicas", solver.params.replicas},
                 {"beta", solver.params.beta},
                 {"gamma0", solver.params.gamma0},
                 {"sa_t_hot", solver.params.sa_t_hot},
                 {"sa_t_cold", solver.params.sa_t_cold},
                 {"include_initial", solver.params.include_initial},
                 {"schedule",
                  solver.schedule == AnnealSchedule::Kind::reverse ? "reverse" : "forward"},
                 {"s_min", solver.s_min}};
  j["sim"] = {{"trials", trials},
              {"duration_s", sim.duration_s},
              {"redispatch_on_dropoff", sim.redispatch_on_dropoff},
              {"metric_sample_dt", sim.metric_sample_dt}};
  j["sweep_smin"] = {{"instance_vehicles", sweep_smin.instance_vehicles},
                     {"instance_customers", sweep_smin.instance_customers},
                     {"ramp_fraction", sweep_smin.ramp_fraction}};
  j["seed"] = seed;
  return j.dump(2);
}

void ExperimentConfig::validate() const {
  try {
    const GridMap g = grid();
    for (const auto& [r, c] : stations)
      (void)g.snap(Position{c * map.cell_size_m, r * map.cell_size_m});
    for (const auto& [r, c] : vehicle_positions)
      (void)g.snap(Position{c * map.cell_size_m, r * map.cell_size_m});
    if (stations.empty()) throw ConfigError("need at least one station");
    if (vehicle_count < 1) throw ConfigError("need at least one vehicle");
    if (!vehicle_positions.empty() &&
        static_cast<int>(vehicle_positions.size()) != vehicle_count)
      throw ConfigError("initial_positions must match the vehicle count when given");
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (sim.duration_s <= 0.0) throw ConfigError("duration_s must be positive");
    if (sim.metric_sample_dt <= 0.0) throw ConfigError("metric_sample_dt must be positive");
    if (demand.request_interval_s <= 0.0) throw ConfigError("request_interval_s must be positive");
    if (weights.b0 < 0.0 || weights.b1 < 0.0) throw ConfigError("b0 and b1 must be non-negative");
    if (weights.a2 <= 0.0 || weights.a2 >= 0.5)
      throw ConfigError("a2 must lie in (0, 0.5) so violations stay penalized");
    if (solver.s_min <= 0.0 || solver.s_min > 1.0) throw ConfigError("s_min must lie in (0, 1]");
    if (sweep_smin.ramp_fraction <= 0.0 || sweep_smin.ramp_fraction >= 0.5)
      throw ConfigError("ramp_fraction must lie in (0, 0.5)");
    if (sweep_smin.instance_vehicles < 1 || sweep_smin.instance_customers < 0)
      throw ConfigError("instance shape must have >= 1 vehicle and >= 0 customers");
    for (const std::string& p : policies) (void)policy_kind_from_name(p);
    (void)demand_model(g);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

GridMap ExperimentConfig::grid() const {
  return GridMap(map.rows, map.cols, map.cell_size_m, map.speed_mps);
}

DemandModel ExperimentConfig::demand_model(const GridMap& g) const {
  const double rate = 1.0 / demand.request_interval_s;
  if (!demand.origin_weights.empty() || !demand.dest_weights.empty()) {
    if (demand.origin_weights.empty() || demand.dest_weights.empty())
      throw ConfigError("explicit demand weights need both origin_weights and dest_weights");
    return DemandModel::from_weights(g, rate, demand.origin_weights, demand.dest_weights);
  }
  std::vector<int> hot_o, hot_d;
  for (const auto& [r, c] : demand.hot_origin_cells) {
    if (r < 0 || r >= g.rows() || c < 0 || c >= g.cols())
      throw ConfigError("hot origin cell outside the grid");
    hot_o.push_back(g.node_index(r, c));
  }
  for (const auto& [r, c] : demand.hot_dest_cells) {
    if (r < 0 || r >= g.rows() || c < 0 || c >= g.cols())
      throw ConfigError("hot destination cell outside the grid");
    hot_d.push_back(g.node_index(r, c));
  }
  return DemandModel::with_hotspots(g, rate, hot_o, hot_d, demand.hot_multiplier);
}

std::vector<Position> ExperimentConfig::station_positions(const GridMap& g) const {
  std::vector<Position> out;
  for (const auto& [r, c] : stations)
    out.push_back(g.snap(Position{c * map.cell_size_m, r * map.cell_size_m}));
  return out;
}

std::vector<Position> ExperimentConfig::initial_vehicle_positions(const GridMap& g) const {
  std::vector<Position> out;
  if (!vehicle_positions.empty()) {
    for (const auto& [r, c] : vehicle_positions)
      out.push_back(g.snap(Position{c * map.cell_size_m, r * map.cell_size_m}));
    return out;
  }
  const std::vector<Position> st = station_positions(g);
  for (int i = 0; i < vehicle_count; ++i) out.push_back(st[i % st.size()]);
  return out;
}

Policy ExperimentConfig::policy_for(const std::string& name) const {
  Policy p;
  p.kind = policy_kind_from_name(name);
  p.weights = weights;
  p.solver = solver;
  return p;
}

int worker_count(std::size_t tasks) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("MMDP_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) hw = static_cast<unsigned>(v);
  }
  return static_cast<int>(std::min<std::size_t>(hw, std::max<std::size_t>(tasks, 1)));
}

namespace {

template <typename F>
void parallel_for(std::size_t tasks, F&& fn) {
  const int workers = worker_count(tasks);
  if (workers <= 1) {
    for (std::size_t i = 0; i < tasks; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (std::thread& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

struct MetricDef {
  const char* name;
  double TrialMetrics::*field;
};

constexpr MetricDef kMetrics[] = {
    {"wait_time_s", &TrialMetrics::mean_wait_s},
    {"num_waiting", &TrialMetrics::mean_num_waiting},
    {"customer_dispatch_time_s", &TrialMetrics::mean_customer_dispatch_s},
    {"station_dispatch_time_s", &TrialMetrics::mean_station_dispatch_s},
    {"inter_vehicle_distance_m", &TrialMetrics::mean_inter_vehicle_distance_m},
    {"total_travel_distance_km", &TrialMetrics::total_travel_km},
};

ResultRow make_row(std::string experiment, std::string policy, std::string param,
                   std::string metric, std::vector<double> values) {
  ResultRow row;
  row.experiment = std::move(experiment);
  row.policy = std::move(policy);
  row.param = std::move(param);
  row.metric = std::move(metric);
  row.values = std::move(values);
  row.n = static_cast<int>(row.values.size());
  double sum = 0.0;
  for (double v : row.values) sum += v;
  row.mean = row.n ? sum / row.n : 0.0;
  double ss = 0.0;
  for (double v : row.values) ss += (v - row.mean) * (v - row.mean);
  row.stddev = row.n > 1 ? std::sqrt(ss / (row.n - 1)) : 0.0;
  return row;
}

std::vector<TrialMetrics> run_policy_trials(const ExperimentConfig& config, const GridMap& g,
                                            const DemandModel& dm, const Policy& policy) {
  const std::vector<Position> stations = config.station_positions(g);
  const std::vector<Position> vehicles = config.initial_vehicle_positions(g);
  std::vector<TrialMetrics> metrics(config.trials);
  parallel_for(config.trials, [&](std::size_t trial) {
    // trial seeds ignore the policy so every policy faces the same demand
    const std::uint64_t seed = Rng::mix(config.seed, trial);
    Simulation sim(g, dm, stations, vehicles, policy, config.sim, seed);
    metrics[trial] = sim.run();
  });
  return metrics;
}

void append_metric_rows(std::vector<ResultRow>& rows, const std::string& experiment,
                        const std::string& policy, const std::string& param,
                        const std::vector<TrialMetrics>& trials) {
  for (const MetricDef& def : kMetrics) {
    std::vector<double> values;
    values.reserve(trials.size());
    for (const TrialMetrics& t : trials) values.push_back(t.*(def.field));
    rows.push_back(make_row(experiment, policy, param, def.name, std::move(values)));
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const GridMap g = config.grid();
  const DemandModel dm = config.demand_model(g);
  ExperimentResult result;
  const std::string param = fmt_num(config.demand.request_interval_s);
  for (const std::string& name : config.policies) {
    const Policy policy = config.policy_for(name);
    const auto trials = run_policy_trials(config, g, dm, policy);
    append_metric_rows(result.rows, "run", name, param, trials);
  }
  return result;
}

ExperimentResult sweep_b1(const ExperimentConfig& config, std::span<const double> b1_values) {
  if (b1_values.empty()) throw ConfigError("sweep-b1 needs at least one value");
  const GridMap g = config.grid();
  const DemandModel dm = config.demand_model(g);

  std::vector<std::string> policies;
  for (const std::string& name : config.policies)
    if (name == "proposed_static" || name == "proposed_dynamic") policies.push_back(name);
  if (policies.empty()) policies = {"proposed_static", "proposed_dynamic"};

  ExperimentResult result;
  for (const std::string& name : policies) {
    for (double b1 : b1_values) {
      ExperimentConfig point = config;
      point.weights.b1 = b1;
      const Policy policy = point.policy_for(name);
      const auto trials = run_policy_trials(point, g, dm, policy);
      append_metric_rows(result.rows, "sweep-b1", name, fmt_num(b1), trials);
    }
  }
  return result;
}

DispatchInstance make_random_instance(const ExperimentConfig& config, const GridMap& g,
                                      const DemandModel& dm, std::uint64_t seed,
                                      std::vector<std::string>* notes) {
  Rng rng(seed);
  DispatchInstance inst;
  inst.state.stations = config.station_positions(g);
  const int n_s = static_cast<int>(inst.state.stations.size());
  int n_v = config.sweep_smin.instance_vehicles;
  int n_c = std::min(config.sweep_smin.instance_customers, n_v);
  bool shrunk = false;
  while (n_v * (n_s + n_c) > 24 && (n_c > 0 || n_v > 1)) {
    if (n_c > 0)
      --n_c;
    else
      --n_v;
    shrunk = true;
  }
  if (shrunk && notes)
    notes->push_back("instance " + std::to_string(seed) +
                     " shrunk to fit the exhaustive-solver budget: vehicles=" +
                     std::to_string(n_v) + " customers=" + std::to_string(n_c));

  const OperationalStats stats = OperationalStats::cold_start(g);
  inst.state.vehicles.resize(n_v);
  for (int i = 0; i < n_v; ++i) {
    Vehicle& v = inst.state.vehicles[i];
    v.id = i;
    v.position = g.node(rng.uniform_int(g.num_nodes()));
    if (rng.bernoulli(stats.occupancy)) {
      int d = rng.uniform_int(g.num_nodes());
      while (same_point(g.node(d), v.position)) d = rng.uniform_int(g.num_nodes());
      v.passenger = 900 + static_cast<std::uint64_t>(i);
      v.dropoff = g.node(d);
      inst.state.in_service.push_back(*v.passenger);
    }
  }
  for (int k = 0; k < n_c; ++k) {
    CustomerRequest r;
    r.id = static_cast<std::uint64_t>(k);
    const int oc = dm.sample_origin_cell(rng);
    int dc = dm.sample_dest_cell(rng);
    while (dc == oc) dc = dm.sample_dest_cell(rng);
    r.origin = g.node(oc);
    r.destination = g.node(dc);
    r.request_time = static_cast<double>(k);
    inst.state.waiting.push_back(r);
  }

  inst.targets = compute_targets(TargetMode::static_mode, inst.state, dm, stats,
                                 inst.state.stations, g);
  QuboWeights w = config.weights;
  w.enable_ha1 = true;
  w.enable_hb1 = true;
  inst.problem = build_proposed(inst.state, inst.targets, w, g);
  inst.greedy_bits = greedy_initial_state(inst.state, inst.targets, inst.problem, g);
  inst.e_init = inst.problem.energy(inst.greedy_bits);
  return inst;
}

ExperimentResult sweep_smin(const ExperimentConfig& config, std::span<const double> smin_values,
                            int instance_count) {
  if (smin_values.empty()) throw ConfigError("sweep-smin needs at least one value");
  for (double s : smin_values)
    if (s <= 0.0 || s > 1.0) throw ConfigError("s_min values must lie in (0, 1]");
  if (instance_count < 1) throw ConfigError("instance count must be >= 1");

  const GridMap g = config.grid();
  const DemandModel dm = config.demand_model(g);
  ExperimentResult result;

  // instances generated sequentially so notes and seeds stay deterministic
  std::vector<DispatchInstance> instances;
  std::vector<double> e_opt(instance_count);
  for (int i = 0; i < instance_count; ++i) {
    std::uint64_t seed = Rng::mix(config.seed, 0x57A7 + static_cast<std::uint64_t>(i));
    for (int attempt = 0;; ++attempt) {
      DispatchInstance inst = make_random_instance(config, g, dm, seed, &result.notes);
      const auto [bits, opt] = brute_force(inst.problem);
      if (opt > 1e-9 || attempt >= 8) {
        if (opt <= 1e-9)
          result.notes.push_back("instance " + std::to_string(i) +
                                 " kept with non-positive ground energy");
        instances.push_back(std::move(inst));
        e_opt[i] = opt;
        break;
      }
      result.notes.push_back("instance " + std::to_string(i) +
                             " regenerated: ground energy too close to zero");
      seed = Rng::mix(seed, 0xBAD + static_cast<std::uint64_t>(attempt));
    }
  }

  struct InstanceOutcome {
    double e_res_init = 0.0;
    double e_res_fa = 0.0;
    std::vector<double> e_res_ra;       // per s_min
    std::vector<double> e_res_ra_incl;  // per s_min
  };
  std::vector<InstanceOutcome> outcomes(instance_count);

  parallel_for(instance_count, [&](std::size_t i) {
    const DispatchInstance& inst = instances[i];
    InstanceOutcome& out = outcomes[i];
    SolverParams params = config.solver.params;
    params.include_initial = false;

    out.e_res_init = residual_energy(inst.e_init, e_opt[i]);

    params.seed = Rng::mix(config.seed, 0xFA00 + i);
    const SolveReport fa = solve_sqa(inst.problem, AnnealSchedule::forward(), params);
    out.e_res_fa = residual_energy(fa.best_energy, e_opt[i]);

    for (std::size_t si = 0; si < smin_values.size(); ++si) {
      params.seed = Rng::mix(config.seed, 0x4A00 + i * 131 + si);
      const AnnealSchedule sched =
          AnnealSchedule::reverse(smin_values[si], config.sweep_smin.ramp_fraction);
      const SolveReport ra = solve_sqa(inst.problem, sched, params, &inst.greedy_bits);
      out.e_res_ra.push_back(residual_energy(ra.best_energy, e_opt[i]));
      out.e_res_ra_incl.push_back(
          residual_energy(std::min(ra.best_energy, inst.e_init), e_opt[i]));
    }
  });

  for (std::size_t si = 0; si < smin_values.size(); ++si) {
    std::vector<double> ra, ra_incl;
    for (const InstanceOutcome& out : outcomes) {
      ra.push_back(out.e_res_ra[si]);
      ra_incl.push_back(out.e_res_ra_incl[si]);
    }
    const std::string param = fmt_num(smin_values[si]);
    result.rows.push_back(
        make_row("sweep-smin", "proposed_static", param, "e_res_ra", std::move(ra)));
    result.rows.push_back(
        make_row("sweep-smin", "proposed_static", param, "e_res_ra_incl", std::move(ra_incl)));
  }
  std::vector<double> fa, init;
  for (const InstanceOutcome& out : outcomes) {
    fa.push_back(out.e_res_fa);
    init.push_back(out.e_res_init);
  }
  result.rows.push_back(
      make_row("sweep-smin", "proposed_static", "baseline", "e_res_fa", std::move(fa)));
  result.rows.push_back(
      make_row("sweep-smin", "proposed_static", "baseline", "e_res_initial", std::move(init)));
  return result;
}

std::string rows_to_csv(std::span<const ResultRow> rows) {
  std::string out = "experiment,policy,param,metric,mean,std,n\n";
  for (const ResultRow& r : rows) {
    out += r.experiment + ',' + r.policy + ',' + r.param + ',' + r.metric + ',' +
           fmt_num(r.mean) + ',' + fmt_num(r.stddev) + ',' + std::to_string(r.n) + '\n';
  }
  return out;
}

void write_result_files(const ExperimentConfig& config, const ExperimentResult& result,
                        const std::string& experiment, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + out_dir);

  {
    std::ofstream csv(fs::path(out_dir) / "results.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write results.csv");
    csv << rows_to_csv(result.rows);
  }
  json summary;
  summary["experiment"] = experiment;
  summary["config"] = json::parse(config.to_json_text());
  json rows = json::array();
  for (const ResultRow& r : result.rows) {
    json row;
    row["experiment"] = r.experiment;
    row["policy"] = r.policy;
    row["param"] = r.param;
    row["metric"] = r.metric;
    row["mean"] = r.mean;
    row["std"] = r.stddev;
    row["n"] = r.n;
    row["values"] = r.values;
    rows.push_back(std::move(row));
  }
  summary["rows"] = std::move(rows);
  summary["notes"] = result.notes;
  std::ofstream js(fs::path(out_dir) / "summary.json", std::ios::binary);
  if (!js) throw std::runtime_error("cannot write summary.json");
  js << summary.dump(2) << '\n';
}

std::string solve_problem_text(const std::string& problem_json, const ExperimentConfig& config,
                               bool with_timing) {
  const QuboProblem problem = QuboProblem::from_json(problem_json);
  SolverParams params = config.solver.params;
  params.seed = config.seed;
  SolveReport report;
  if (config.solver.method == SolverConfig::Method::sa) {
    report = solve_sa(problem, params);
  } else {
    if (config.solver.schedule == AnnealSchedule::Kind::reverse)
      throw ConfigError("solving a bare problem has no warm start; use the forward schedule");
    report = solve_sqa(problem, AnnealSchedule::forward(), params);
  }
  return report.to_json(with_timing);
}

std::string oracle_problem_text(const std::string& problem_json) {
  const QuboProblem problem = QuboProblem::from_json(problem_json);
  const auto [bits, energy] = brute_force(problem);
  json j;
  j["bits"] = bits;
  j["energy"] = energy;
  return j.dump(2);
}

}  // namespace mmdp
