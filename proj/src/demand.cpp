#include "demand.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mmdp {

namespace {

std::vector<double> normalize(std::vector<double> w) {
  double sum = 0.0;
  for (double v : w) {
    if (v < 0.0) throw std::invalid_argument("demand weights must be non-negative");
    sum += v;
  }
  if (sum <= 0.0) throw std::invalid_argument("demand weights must not all be zero");
  for (double& v : w) v /= sum;
  return w;
}

std::vector<double> cumulative(const std::vector<double>& pmf) {
  std::vector<double> cdf(pmf.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    acc += pmf[i];
    cdf[i] = acc;
  }
  cdf.back() = 1.0;
  return cdf;
}

int support_size(const std::vector<double>& pmf) {
  return static_cast<int>(std::count_if(pmf.begin(), pmf.end(), [](double v) { return v > 0.0; }));
}

}  // namespace

DemandModel DemandModel::with_hotspots(const GridMap& map, double rate_fc,
                                       const std::vector<int>& hot_origin_cells,
                                       const std::vector<int>& hot_dest_cells,
                                       double hot_multiplier) {
  if (hot_multiplier <= 0.0) throw std::invalid_argument("hot_multiplier must be positive");
  std::vector<double> ow(map.num_nodes(), 1.0), dw(map.num_nodes(), 1.0);
  for (int c : hot_origin_cells) {
    if (c < 0 || c >= map.num_nodes()) throw std::out_of_range("hot origin cell out of range");
    ow[c] = hot_multiplier;
  }
  for (int c : hot_dest_cells) {
    if (c < 0 || c >= map.num_nodes()) throw std::out_of_range("hot destination cell out of range");
    dw[c] = hot_multiplier;
  }
  return from_weights(map, rate_fc, std::move(ow), std::move(dw));
}

DemandModel DemandModel::from_weights(const GridMap& map, double rate_fc,
                                      std::vector<double> origin_weights,
                                      std::vector<double> dest_weights) {
  if (rate_fc <= 0.0) throw std::invalid_argument("arrival rate must be positive");
  if (static_cast<int>(origin_weights.size()) != map.num_nodes() ||
      static_cast<int>(dest_weights.size()) != map.num_nodes())
    throw std::invalid_argument("demand weights must have one entry per grid cell");
  DemandModel m;
  m.rate_fc_ = rate_fc;
  m.origin_pmf_ = normalize(std::move(origin_weights));
  m.dest_pmf_ = normalize(std::move(dest_weights));
  if (support_size(m.dest_pmf_) < 2)
    throw std::invalid_argument("destination pmf needs at least two reachable cells");
  m.origin_cdf_ = cumulative(m.origin_pmf_);
  m.dest_cdf_ = cumulative(m.dest_pmf_);
  return m;
}

double DemandModel::origin_prob(int cell) const {
  if (cell < 0 || cell >= num_cells()) throw std::out_of_range("cell out of range");
  return origin_pmf_[cell];
}

double DemandModel::dest_prob(int cell) const {
  if (cell < 0 || cell >= num_cells()) throw std::out_of_range("cell out of range");
  return dest_pmf_[cell];
}

std::vector<CustomerRequest> DemandModel::sample_arrivals(const GridMap& map, double t0, double dt,
                                                          Rng& rng,
                                                          std::uint64_t first_id) const {
  if (dt < 0.0) throw std::invalid_argument("dt must be non-negative");
  std::vector<CustomerRequest> out;
  // Poisson process via exponential inter-arrival gaps.
  double t = t0 + rng.exponential(1.0 / rate_fc_);
  while (t < t0 + dt) {
    const int oc = rng.sample_cdf(origin_cdf_);
    int dc = rng.sample_cdf(dest_cdf_);
    while (dc == oc) dc = rng.sample_cdf(dest_cdf_);
    CustomerRequest r;
    r.id = first_id++;
    r.origin = map.node(oc);
    r.destination = map.node(dc);
    r.request_time = t;
    out.push_back(r);
    t += rng.exponential(1.0 / rate_fc_);
  }
  return out;
}

}  // namespace mmdp
