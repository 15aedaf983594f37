#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "demand.hpp"
#include "grid.hpp"
#include "sim.hpp"

namespace mmdp {

/// Raised for malformed or inconsistent configuration input; the CLI maps it
/// to its own exit code.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MapSpec {
  int rows = 4;
  int cols = 4;
  double cell_size_m = 200.0;
  double speed_mps = 4.0;
};

struct DemandSpec {
  double request_interval_s = 60.0;
  std::vector<std::pair<int, int>> hot_origin_cells = {{2, 3}, {3, 2}, {3, 3}};
  std::vector<std::pair<int, int>> hot_dest_cells = {{2, 0}, {3, 0}, {3, 1}};
  double hot_multiplier = 10.0;
  std::vector<double> origin_weights;  // explicit per-cell weights override the hot sets
  std::vector<double> dest_weights;
};

struct SweepSminSpec {
  int instance_vehicles = 4;
  int instance_customers = 2;
  double ramp_fraction = 0.25;
};

struct ExperimentConfig {
  MapSpec map;
  std::vector<std::pair<double, double>> stations = {{1, 1}, {1, 2}, {2, 1}, {2, 2}};  // (row, col)
  int vehicle_count = 6;
  std::vector<std::pair<double, double>> vehicle_positions;  // (row, col); empty: stations, round robin
  DemandSpec demand;
  std::vector<std::string> policies = {"greedy", "vrp", "proposed_no_ha1", "proposed_static",
                                       "proposed_dynamic"};
  QuboWeights weights;
  SolverConfig solver;
  SimConfig sim;
  int trials = 10;
  SweepSminSpec sweep_smin;
  std::uint64_t seed = 1;

  static ExperimentConfig from_json_text(const std::string& text);
  std::string to_json_text() const;
  void validate() const;

  GridMap grid() const;
  DemandModel demand_model(const GridMap& map) const;
  std::vector<Position> station_positions(const GridMap& map) const;
  std::vector<Position> initial_vehicle_positions(const GridMap& map) const;
  Policy policy_for(const std::string& name) const;
};

/// One aggregate line of a result table.
struct ResultRow {
  std::string experiment;
  std::string policy;
  std::string param;
  std::string metric;
  double mean = 0.0;
  double stddev = 0.0;
  int n = 0;
  std::vector<double> values;
};

std::string rows_to_csv(std::span<const ResultRow> rows);

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<std::string> notes;
};

ExperimentResult run_experiment(const ExperimentConfig& config);
ExperimentResult sweep_b1(const ExperimentConfig& config, std::span<const double> b1_values);
ExperimentResult sweep_smin(const ExperimentConfig& config, std::span<const double> smin_values,
                            int instance_count);

/// A self-contained dispatch scene with its single-step problem and warm
/// start, used by the s_min sweep and the solver benchmarks. The shape is
/// shrunk if needed so the exhaustive solver stays applicable.
struct DispatchInstance {
  WorldState state;
  StationTargets targets;
  QuboProblem problem;
  std::vector<std::uint8_t> greedy_bits;
  double e_init = 0.0;
};

DispatchInstance make_random_instance(const ExperimentConfig& config, const GridMap& map,
                                      const DemandModel& demand, std::uint64_t seed,
                                      std::vector<std::string>* notes);

/// Writes results.csv and summary.json under out_dir.
void write_result_files(const ExperimentConfig& config, const ExperimentResult& result,
                        const std::string& experiment, const std::string& out_dir);

/// Solves a serialized problem with the configured sampler and returns the
/// report as JSON. Timing fields are emitted only on request since they are
/// not reproducible.
std::string solve_problem_text(const std::string& problem_json, const ExperimentConfig& config,
                               bool with_timing);

/// Exhaustive minimum of a serialized problem as JSON {bits, energy}.
std::string oracle_problem_text(const std::string& problem_json);

/// Worker count for trial/instance parallelism; MMDP_THREADS caps it.
int worker_count(std::size_t tasks);

}  // namespace mmdp
