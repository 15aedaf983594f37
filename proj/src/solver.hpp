#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qubo.hpp"
#include "rng.hpp"

namespace mmdp {

/// Anneal-fraction profile s(t), piecewise linear over normalized time.
/// Forward runs ramp s from 0 to 1; reverse runs start at 1, descend to
/// s_min, hold, and return to 1 within the same duration as the forward run.
struct AnnealSchedule {
  enum class Kind { forward, reverse };
  Kind kind = Kind::forward;
  double s_min = 1.0;
  std::vector<std::pair<double, double>> segments;  // (time fraction, s)

  static AnnealSchedule forward();
  static AnnealSchedule reverse(double s_min, double ramp_fraction = 0.25);

  double value(double time_fraction) const;
  void validate() const;
};

struct SolverParams {
  int replicas = 16;      // Trotter slices (path-integral sampler)
  int sweeps = 160;       // Monte Carlo sweeps per read
  int reads = 8;          // independent anneals, one sample each
  double beta = 10.0;     // inverse temperature (path-integral sampler)
  double gamma0 = 3.0;    // transverse field at s = 0
  double sa_t_hot = 5.0;  // geometric temperature schedule (classical SA)
  double sa_t_cold = 0.05;
  std::uint64_t seed = 1;
  bool include_initial = false;  // append the warm-start state to the samples
};

struct Sample {
  std::vector<std::uint8_t> bits;
  double energy = 0.0;
};

struct SolveReport {
  std::vector<Sample> samples;
  double best_energy = 0.0;
  std::optional<double> e_opt;
  std::optional<double> p_opt;   // fraction of samples hitting e_opt
  double t_c = 0.0;              // measured wall-clock seconds per read
  std::optional<double> tts;     // time to 0.99 success probability
  std::optional<double> e_res;   // (best - e_opt) / e_opt
  bool initial_state_included = false;
  bool negative_e_opt = false;

  const Sample& best() const;
  std::string to_json(bool with_timing = false) const;
};

/// Classical simulated annealing: Metropolis single-flip sweeps under a
/// geometric temperature schedule, one restart per read.
SolveReport solve_sa(const QuboProblem& problem, const SolverParams& params);

/// Path-integral Monte Carlo over coupled replicas with transverse field
/// Gamma(s) = gamma0 * (1 - s). Reverse schedules require an initial state;
/// every replica starts from it. Each read reports its best replica.
SolveReport solve_sqa(const QuboProblem& problem, const AnnealSchedule& schedule,
                      const SolverParams& params,
                      const std::vector<std::uint8_t>* initial = nullptr);

/// Exhaustive minimum for problems of at most 24 variables. Ties resolve to
/// the bitstring with the smallest value of sum_i b_i 2^i.
std::pair<std::vector<std::uint8_t>, double> brute_force(const QuboProblem& problem);

/// Warm start for the single-step formulation: longest-waiting customers take
/// the nearest free vehicle, then surplus vehicles go to the station with the
/// highest remaining tau (decremented per assignment). Satisfies both hard
/// constraints.
std::vector<std::uint8_t> greedy_initial_state(const WorldState& state,
                                               const StationTargets& targets,
                                               const QuboProblem& problem, const GridMap& map);

/// Expected total time to reach the optimum with probability p given the
/// per-read success probability p_opt and per-read time t_c.
double tts(double p, double p_opt, double t_c);

double residual_energy(double e_min, double e_opt);

/// Fills e_opt, p_opt, e_res and, when timing is available, tts.
void attach_ground_truth(SolveReport& report, double e_opt);

}  // namespace mmdp
