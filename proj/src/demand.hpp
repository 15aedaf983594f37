#pragma once

#include <cstdint>
#include <vector>

#include "grid.hpp"
#include "rng.hpp"

namespace mmdp {

struct CustomerRequest {
  std::uint64_t id = 0;
  Position origin{};
  Position destination{};
  double request_time = 0.0;
};

/// Poisson demand with independent spatial distributions for trip origins and
/// destinations. A demand cell is a grid intersection; its pmf value is the
/// probability that a request starts (or ends) there.
class DemandModel {
 public:
  /// All cells carry unit base weight; cells listed in a hot set carry
  /// hot_multiplier instead. Weights are normalized into pmfs.
  static DemandModel with_hotspots(const GridMap& map, double rate_fc,
                                   const std::vector<int>& hot_origin_cells,
                                   const std::vector<int>& hot_dest_cells,
                                   double hot_multiplier);

  /// Explicit per-cell weights, normalized at construction.
  static DemandModel from_weights(const GridMap& map, double rate_fc,
                                  std::vector<double> origin_weights,
                                  std::vector<double> dest_weights);

  double rate_fc() const { return rate_fc_; }
  int num_cells() const { return static_cast<int>(origin_pmf_.size()); }

  double origin_prob(int cell) const;
  double dest_prob(int cell) const;
  const std::vector<double>& origin_pmf() const { return origin_pmf_; }
  const std::vector<double>& dest_pmf() const { return dest_pmf_; }

  /// Poisson arrivals over [t0, t0 + dt), sorted by request time. Destination
  /// cells are resampled until they differ from the origin cell. Ids are
  /// assigned sequentially starting at first_id.
  std::vector<CustomerRequest> sample_arrivals(const GridMap& map, double t0, double dt, Rng& rng,
                                               std::uint64_t first_id = 0) const;

  int sample_origin_cell(Rng& rng) const { return rng.sample_cdf(origin_cdf_); }
  int sample_dest_cell(Rng& rng) const { return rng.sample_cdf(dest_cdf_); }

 private:
  double rate_fc_ = 0.0;
  std::vector<double> origin_pmf_, dest_pmf_;
  std::vector<double> origin_cdf_, dest_cdf_;
};

}  // namespace mmdp
