#include "analogcast/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "analogcast/error.hpp"

namespace analogcast {

bool nearer(const Candidate& a, const Candidate& b) {
  return a.distance != b.distance ? a.distance < b.distance : a.period < b.period;
}

WeightVector kernel_weights_sorted(std::span<const Candidate> sorted, double theta1, int m) {
  if (sorted.empty()) throw DataError("empty analog candidate pool");
  if (!(theta1 > 0.0)) throw ConfigError("kernel bandwidth theta1 must be positive");
  if (m < 1) throw ConfigError("neighbourhood size m must be >= 1");

  std::size_t usable = 0;
  while (usable < sorted.size() && std::isfinite(sorted[usable].distance)) ++usable;
  if (usable == 0) throw NumericError("no analog candidate has a finite distance");

  WeightVector w;
  w.bandwidth = theta1;
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(m), usable);
  w.pool_truncated = k < static_cast<std::size_t>(m);
  w.support.reserve(k);
  w.weights.reserve(k);
  // Shift by the smallest squared distance so tiny bandwidths do not underflow.
  const double d0 = sorted[0].distance * sorted[0].distance;
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double d_sq = sorted[i].distance * sorted[i].distance;
    const double v = std::exp(-(d_sq - d0) / (2.0 * theta1));
    w.support.push_back(sorted[i].period);
    w.weights.push_back(v);
    total += v;
  }
  for (double& v : w.weights) v /= total;
  w.radius_sq = sorted[k - 1].distance * sorted[k - 1].distance;
  return w;
}

WeightVector kernel_weights(std::span<const Candidate> candidates, double theta1, int m) {
  if (candidates.empty()) throw DataError("empty analog candidate pool");
  std::vector<Candidate> sorted(candidates.begin(), candidates.end());
  // NaN distances would break the ordering; treat them as unusable.
  for (auto& c : sorted)
    if (std::isnan(c.distance)) c.distance = std::numeric_limits<double>::infinity();
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(std::max(m, 1)), sorted.size());
  std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end(), nearer);
  sorted.resize(k);
  return kernel_weights_sorted(sorted, theta1, m);
}

}  // namespace analogcast
