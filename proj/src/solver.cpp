#include "solver.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace mmdp {

using nlohmann::json;

AnnealSchedule AnnealSchedule::forward() {
  AnnealSchedule s;
  s.kind = Kind::forward;
  s.segments = {{0.0, 0.0}, {1.0, 1.0}};
  s.validate();
  return s;
}

AnnealSchedule AnnealSchedule::reverse(double s_min, double ramp_fraction) {
  if (s_min <= 0.0 || s_min > 1.0) throw std::invalid_argument("s_min must lie in (0, 1]");
  if (ramp_fraction <= 0.0 || ramp_fraction >= 0.5)
    throw std::invalid_argument("ramp_fraction must lie in (0, 0.5)");
  AnnealSchedule s;
  s.kind = Kind::reverse;
  s.s_min = s_min;
  s.segments = {{0.0, 1.0}, {ramp_fraction, s_min}, {1.0 - ramp_fraction, s_min}, {1.0, 1.0}};
  s.validate();
  return s;
}

double AnnealSchedule::value(double f) const {
  f = std::clamp(f, 0.0, 1.0);
  for (std::size_t i = 1; i < segments.size(); ++i) {
    if (f <= segments[i].first) {
      const auto& [f0, s0] = segments[i - 1];
      const auto& [f1, s1] = segments[i];
      if (f1 <= f0) return s1;
      return s0 + (s1 - s0) * (f - f0) / (f1 - f0);
    }
  }
  return segments.back().second;
}

void AnnealSchedule::validate() const {
  if (segments.size() < 2) throw std::invalid_argument("schedule needs at least two points");
  if (segments.front().first != 0.0 || segments.back().first != 1.0)
    throw std::invalid_argument("schedule must span time fractions 0 to 1");
  for (std::size_t i = 1; i < segments.size(); ++i)
    if (segments[i].first < segments[i - 1].first)
      throw std::invalid_argument("schedule time fractions must be non-decreasing");
  for (const auto& [f, s] : segments)
    if (s < 0.0 || s > 1.0) throw std::invalid_argument("anneal fraction must lie in [0, 1]");
  if (kind == Kind::forward) {
    if (segments.front().second != 0.0 || segments.back().second != 1.0)
      throw std::invalid_argument("forward schedule must ramp s from 0 to 1");
    for (std::size_t i = 1; i < segments.size(); ++i)
      if (segments[i].second < segments[i - 1].second)
        throw std::invalid_argument("forward schedule must be monotone");
  } else {
    if (segments.front().second != 1.0 || segments.back().second != 1.0)
      throw std::invalid_argument("reverse schedule must start and end at s = 1");
    double lowest = 1.0;
    for (const auto& [f, s] : segments) lowest = std::min(lowest, s);
    if (std::abs(lowest - s_min) > 1e-12)
      throw std::invalid_argument("reverse schedule must reach s_min");
  }
}

const Sample& SolveReport::best() const {
  if (samples.empty()) throw std::runtime_error("empty sample set");
  const Sample* b = &samples.front();
  for (const Sample& s : samples)
    if (s.energy < b->energy) b = &s;
  return *b;
}

std::string SolveReport::to_json(bool with_timing) const {
  json j;
  json arr = json::array();
  for (const Sample& s : samples) {
    json js;
    js["bits"] = s.bits;
    js["energy"] = s.energy;
    arr.push_back(std::move(js));
  }
  j["samples"] = std::move(arr);
  j["best_energy"] = best_energy;
  j["initial_state_included"] = initial_state_included;
  if (e_opt) j["e_opt"] = *e_opt;
  if (p_opt) j["p_opt"] = *p_opt;
  if (e_res) j["e_res"] = *e_res;
  if (negative_e_opt) j["negative_e_opt"] = true;
  if (with_timing) {
    j["t_c"] = t_c;
    if (tts) j["tts"] = *tts;
  }
  return j.dump(2);
}

namespace {

// coefficient view with per-variable adjacency for O(degree) flip deltas
struct Couplings {
  int n = 0;
  double offset = 0.0;
  std::vector<double> linear;
  std::vector<std::vector<std::pair<int, double>>> adj;

  explicit Couplings(const QuboProblem& p)
      : n(p.num_vars()), offset(p.offset()), linear(p.linear()), adj(p.num_vars()) {
    for (const auto& [ij, c] : p.quadratic()) {
      adj[ij.first].push_back({ij.second, c});
      adj[ij.second].push_back({ij.first, c});
    }
  }

  double field(const std::vector<std::uint8_t>& bits, int i) const {
    double f = linear[i];
    for (const auto& [j, c] : adj[i])
      if (bits[j]) f += c;
    return f;
  }
};

double full_energy(const Couplings& q, const std::vector<std::uint8_t>& bits) {
  double e = q.offset;
  for (int i = 0; i < q.n; ++i)
    if (bits[i]) {
      e += q.linear[i];
      for (const auto& [j, c] : q.adj[i])
        if (j > i && bits[j]) e += c;
    }
  return e;
}

void finalize(SolveReport& r) {
  if (r.samples.empty()) throw std::runtime_error("solver produced no samples");
  r.best_energy = r.samples.front().energy;
  for (const Sample& s : r.samples) r.best_energy = std::min(r.best_energy, s.energy);
}

}  // namespace

SolveReport solve_sa(const QuboProblem& problem, const SolverParams& params) {
  if (params.reads < 1 || params.sweeps < 1) throw std::invalid_argument("reads and sweeps must be >= 1");
  if (params.sa_t_hot <= 0.0 || params.sa_t_cold <= 0.0 || params.sa_t_cold > params.sa_t_hot)
    throw std::invalid_argument("need t_hot >= t_cold > 0");
  const Couplings q(problem);
  SolveReport report;
  const auto start = std::chrono::steady_clock::now();
  for (int read = 0; read < params.reads; ++read) {
    Rng rng(Rng::mix(params.seed, 0x5A00 + read));
    std::vector<std::uint8_t> bits(q.n);
    for (int i = 0; i < q.n; ++i) bits[i] = rng.uniform() < 0.5 ? 1 : 0;
    double e = full_energy(q, bits);
    std::vector<std::uint8_t> best_bits = bits;
    double best_e = e;
    const double ratio = params.sa_t_cold / params.sa_t_hot;
    for (int sweep = 0; sweep < params.sweeps; ++sweep) {
      const double frac = params.sweeps > 1 ? static_cast<double>(sweep) / (params.sweeps - 1) : 1.0;
      const double temp = params.sa_t_hot * std::pow(ratio, frac);
      for (int i = 0; i < q.n; ++i) {
        const double delta = (bits[i] ? -1.0 : 1.0) * q.field(bits, i);
        if (delta <= 0.0 || rng.uniform() < std::exp(-delta / temp)) {
          bits[i] ^= 1;
          e += delta;
          if (e < best_e) {
            best_e = e;
            best_bits = bits;
          }
        }
      }
    }
    report.samples.push_back({std::move(best_bits), best_e});
  }
  const auto stop = std::chrono::steady_clock::now();
  report.t_c = std::chrono::duration<double>(stop - start).count() / params.reads;
  finalize(report);
  return report;
}

namespace {

// Ising view of the QUBO under b = (1 + z) / 2.
struct IsingView {
  double constant = 0.0;
  std::vector<double> h;
  std::vector<std::vector<std::pair<int, double>>> adj;  // J couplings

  explicit IsingView(const Couplings& q) : h(q.n, 0.0), adj(q.n) {
    constant = q.offset;
    for (int i = 0; i < q.n; ++i) {
      constant += q.linear[i] / 2.0;
      h[i] += q.linear[i] / 2.0;
    }
    for (int i = 0; i < q.n; ++i)
      for (const auto& [j, c] : q.adj[i]) {
        if (j < i) continue;
        constant += c / 4.0;
        h[i] += c / 4.0;
        h[j] += c / 4.0;
        adj[i].push_back({j, c / 4.0});
        adj[j].push_back({i, c / 4.0});
      }
  }
};

}  // namespace

SolveReport solve_sqa(const QuboProblem& problem, const AnnealSchedule& schedule,
                      const SolverParams& params, const std::vector<std::uint8_t>* initial) {
  schedule.validate();
  if (params.reads < 1 || params.sweeps < 1 || params.replicas < 1)
    throw std::invalid_argument("reads, sweeps and replicas must be >= 1");
  if (params.beta <= 0.0) throw std::invalid_argument("beta must be positive");
  if (schedule.kind == AnnealSchedule::Kind::reverse && initial == nullptr)
    throw std::invalid_argument("reverse schedules need an initial state");
  if (initial && static_cast<int>(initial->size()) != problem.num_vars())
    throw std::invalid_argument("initial state length does not match the problem");

  const Couplings q(problem);
  const IsingView ising(q);
  const int n = q.n;
  const int P = params.replicas;
  const double beta_slice = params.beta / P;

  SolveReport report;
  const auto start = std::chrono::steady_clock::now();
  for (int read = 0; read < params.reads; ++read) {
    Rng rng(Rng::mix(params.seed, 0x50A0 + read));
    // spins[p][i] in {-1, +1}
    std::vector<std::vector<int8_t>> spins(P, std::vector<int8_t>(n));
    if (schedule.kind == AnnealSchedule::Kind::reverse) {
      for (int p = 0; p < P; ++p)
        for (int i = 0; i < n; ++i) spins[p][i] = (*initial)[i] ? 1 : -1;
    } else {
      for (int p = 0; p < P; ++p)
        for (int i = 0; i < n; ++i) spins[p][i] = rng.uniform() < 0.5 ? 1 : -1;
    }

    for (int sweep = 0; sweep < params.sweeps; ++sweep) {
      const double frac =
          params.sweeps > 1 ? static_cast<double>(sweep) / (params.sweeps - 1) : 1.0;
      const double s = schedule.value(frac);
      const double gamma = params.gamma0 * (1.0 - s);
      // Suzuki-Trotter coupling along imaginary time; infinite at gamma = 0
      const double arg = params.beta * gamma / P;
      const bool frozen_time = arg < 1e-12;
      const double j_perp = frozen_time ? 0.0 : -0.5 * std::log(std::tanh(arg));

      for (int p = 0; p < P; ++p) {
        const auto& prev = spins[(p + P - 1) % P];
        const auto& next = spins[(p + 1) % P];
        auto& cur = spins[p];
        for (int i = 0; i < n; ++i) {
          double field = ising.h[i];
          for (const auto& [j2, c] : ising.adj[i]) field += c * cur[j2];
          const int time_neighbors = P > 1 ? prev[i] + next[i] : 0;
          if (frozen_time && time_neighbors * cur[i] > 0) continue;  // locked alignment
          double delta = -2.0 * cur[i] * beta_slice * field;
          if (!frozen_time && P > 1) delta += 2.0 * j_perp * cur[i] * time_neighbors;
          if (delta <= 0.0 || rng.uniform() < std::exp(-delta)) cur[i] = -cur[i];
        }
      }

      // collective move: flip a variable across all replicas at once, so the
      // system can still tunnel when the replicas are strongly aligned
      if (gamma > 0.0) {
        for (int i = 0; i < n; ++i) {
          double delta = 0.0;
          for (int p = 0; p < P; ++p) {
            double field = ising.h[i];
            for (const auto& [j2, c] : ising.adj[i]) field += c * spins[p][j2];
            delta += -2.0 * spins[p][i] * beta_slice * field;
          }
          if (delta <= 0.0 || rng.uniform() < std::exp(-delta)) {
            for (int p = 0; p < P; ++p) spins[p][i] = -spins[p][i];
          }
        }
      }
    }

    // report this read's best replica
    std::vector<std::uint8_t> best_bits;
    double best_e = std::numeric_limits<double>::infinity();
    std::vector<std::uint8_t> bits(n);
    for (int p = 0; p < P; ++p) {
      for (int i = 0; i < n; ++i) bits[i] = spins[p][i] > 0 ? 1 : 0;
      const double e = full_energy(q, bits);
      if (e < best_e) {
        best_e = e;
        best_bits = bits;
      }
    }
    report.samples.push_back({std::move(best_bits), best_e});
  }
  const auto stop = std::chrono::steady_clock::now();
  report.t_c = std::chrono::duration<double>(stop - start).count() / params.reads;

  if (params.include_initial && initial) {
    report.samples.push_back({*initial, q.n ? full_energy(q, *initial) : q.offset});
    report.initial_state_included = true;
  }
  finalize(report);
  return report;
}

std::pair<std::vector<std::uint8_t>, double> brute_force(const QuboProblem& problem) {
  const int n = problem.num_vars();
  if (n > 24) throw std::invalid_argument("brute force is limited to 24 variables");
  const Couplings q(problem);
  std::vector<std::uint8_t> bits(n, 0);
  if (n == 0) return {bits, q.offset};

  // Gray-code walk; candidate order still resolves ties toward the smallest
  // plain binary value.
  double e = q.offset;
  double best_e = e;
  std::uint64_t best_code = 0;
  std::uint64_t gray = 0;
  const std::uint64_t total = 1ULL << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    const int flip = std::countr_zero(k);
    const double delta = (bits[flip] ? -1.0 : 1.0) * q.field(bits, flip);
    bits[flip] ^= 1;
    e += delta;
    if ((k & 0xFFFF) == 0) e = full_energy(q, bits);  // kill accumulated drift
    gray = k ^ (k >> 1);
    if (e < best_e - 1e-12 ||
        (std::abs(e - best_e) <= 1e-12 && gray < best_code)) {
      best_e = e;
      best_code = gray;
    }
  }
  std::vector<std::uint8_t> best_bits(n);
  for (int i = 0; i < n; ++i) best_bits[i] = (best_code >> i) & 1;
  return {best_bits, full_energy(q, best_bits)};
}

std::vector<std::uint8_t> greedy_initial_state(const WorldState& state,
                                               const StationTargets& targets,
                                               const QuboProblem& problem, const GridMap& map) {
  const VarMap& vm = problem.varmap();
  if (vm.formulation != Formulation::proposed)
    throw std::invalid_argument("warm start is defined for the single-step formulation");
  if (vm.num_vehicles != state.num_vehicles() || vm.num_stations != state.num_stations() ||
      vm.num_customers > static_cast<int>(state.waiting.size()))
    throw std::invalid_argument("problem does not match the state");

  std::vector<std::uint8_t> bits(problem.num_vars(), 0);
  std::vector<bool> taken(vm.num_vehicles, false);

  // longest-waiting customer first, nearest free vehicle (waiting list is
  // sorted by request time)
  for (int k = 0; k < vm.num_customers; ++k) {
    int best = -1;
    double best_t = std::numeric_limits<double>::infinity();
    for (int i = 0; i < vm.num_vehicles; ++i) {
      if (taken[i]) continue;
      const Vehicle& v = state.vehicles[i];
      const double t =
          map.travel_time_via(v.position, v.planning_destination(), state.waiting[k].origin);
      if (t < best_t - 1e-12) {
        best_t = t;
        best = i;
      }
    }
    if (best < 0) break;
    taken[best] = true;
    bits[vm.customer_var(best, k)] = 1;
  }

  // surplus vehicles go to the station with the highest remaining tau, which
  // is decremented after each assignment
  std::vector<double> tau = targets.tau;
  int surplus = 0;
  for (int i = 0; i < vm.num_vehicles; ++i)
    if (!taken[i]) ++surplus;
  while (surplus > 0) {
    int station = 0;
    for (int j = 1; j < vm.num_stations; ++j)
      if (tau[j] > tau[station] + 1e-12) station = j;

    int best = -1;
    double best_t = std::numeric_limits<double>::infinity();
    for (int i = 0; i < vm.num_vehicles; ++i) {
      if (taken[i]) continue;
      const Vehicle& v = state.vehicles[i];
      const double t =
          map.travel_time_via(v.position, v.planning_destination(), state.stations[station]);
      if (t < best_t - 1e-12) {
        best_t = t;
        best = i;
      }
    }
    taken[best] = true;
    bits[vm.station_var(best, station)] = 1;
    tau[station] -= 1.0;
    --surplus;
  }
  return bits;
}

double tts(double p, double p_opt, double t_c) {
  if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("p must lie in (0, 1)");
  if (p_opt <= 0.0 || p_opt >= 1.0) throw std::invalid_argument("p_opt must lie in (0, 1)");
  return t_c * std::log1p(-p) / std::log1p(-p_opt);
}

double residual_energy(double e_min, double e_opt) {
  if (e_opt == 0.0) throw std::invalid_argument("residual energy is undefined for e_opt = 0");
  return (e_min - e_opt) / e_opt;
}

void attach_ground_truth(SolveReport& report, double e_opt) {
  report.e_opt = e_opt;
  report.negative_e_opt = e_opt < 0.0;
  int hits = 0;
  for (const Sample& s : report.samples)
    if (s.energy <= e_opt + 1e-9) ++hits;
  report.p_opt = report.samples.empty() ? 0.0
                                        : static_cast<double>(hits) /
                                              static_cast<double>(report.samples.size());
  if (e_opt != 0.0) report.e_res = residual_energy(report.best_energy, e_opt);
  if (report.p_opt && *report.p_opt > 0.0 && *report.p_opt < 1.0 && report.t_c > 0.0)
    report.tts = tts(0.99, *report.p_opt, report.t_c);
}

}  // namespace mmdp
