#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "demand.hpp"
#include "grid.hpp"
#include "state.hpp"

namespace mmdp {

/// Fleet statistics gathered during operation. Times are running means of
/// observed dispatch durations; occupancy is the running mean fraction of
/// occupied vehicles.
struct OperationalStats {
  double theta_c = 0.0;      // station -> customer dispatch time
  double theta_s = 0.0;      // vehicle -> station dispatch time
  double theta_s_vac = 0.0;  // vacant vehicle -> station dispatch time
  double occupancy = 0.5;

  std::uint64_t n_theta_c = 0;
  std::uint64_t n_theta_s = 0;
  std::uint64_t n_theta_s_vac = 0;
  std::uint64_t n_occupancy = 0;

  /// Order-of-magnitude priors before any observation: half the map diameter
  /// for all dispatch times, 0.5 occupancy.
  static OperationalStats cold_start(const GridMap& map);

  void add_customer_dispatch(double seconds);
  void add_station_dispatch(double seconds, bool vehicle_was_vacant);
  void add_occupancy_sample(double fraction_occupied);
};

enum class TargetMode { dynamic_mode, static_mode };

/// Desired idle-vehicle count per station with the quantities it was built
/// from. tau[j] == t_sj[j] * f_c * p_select[j] by construction.
struct StationTargets {
  std::vector<double> tau;
  std::vector<double> p_select;
  std::vector<double> t_sj;
  TargetMode mode = TargetMode::static_mode;
};

/// Probability that a vehicle sent to a station ends up serving the next
/// request, marginalized over request locations: each demand cell votes for
/// stations with a normalized exponential decay in travel time, with decay
/// scale theta_c. Sums to one.
std::vector<double> station_selection_probs(std::span<const Position> stations,
                                            const DemandModel& demand, double theta_c,
                                            const GridMap& map);

/// Expected travel time to station_j from the current fleet, marginalized
/// over which subset of vehicles the optimizer may send there. Subset sizes
/// follow Binomial(N - n_c, 1/n_s); within a size, subsets are weighted by an
/// exponential decay of their mean via-destination travel time with scale
/// theta_s. Falls back to theta_s when no surplus vehicle exists; throws when
/// the subset enumeration would exceed the cap (use static mode instead).
double t_sj_dynamic(const WorldState& state, int station_j, const OperationalStats& stats,
                    int n_c, const GridMap& map);

/// Historical average of the travel time to station_j: with probability o the
/// vehicle is mid-trip (half the trip remains, then the leg from the trip
/// destination to the station); otherwise the observed vacant dispatch time.
double t_sj_static(int station_j, const DemandModel& demand, const OperationalStats& stats,
                   std::span<const Position> stations, const GridMap& map);

/// tau_j = t_sj * f_c * P(s_j) for every station, using the mode's travel
/// time estimate.
StationTargets compute_targets(TargetMode mode, const WorldState& state,
                               const DemandModel& demand, const OperationalStats& stats,
                               std::span<const Position> stations, const GridMap& map);

/// Subset-enumeration budget for the dynamic estimate.
inline constexpr std::uint64_t kDynamicSubsetCap = 1ULL << 20;

}  // namespace mmdp
