#pragma once

#include <span>
#include <vector>

namespace analogcast {

struct Candidate {
  int period = 0;
  double distance = 0.0;
};

/// Normalized compact Gaussian kernel weights over the m nearest analogs.
struct WeightVector {
  std::vector<int> support;     // periods, nearest first
  std::vector<double> weights;  // aligned with support, sums to 1
  double bandwidth = 0.0;       // theta_1
  double radius_sq = 0.0;       // largest supported squared distance
  bool pool_truncated = false;  // fewer than m usable candidates
};

/// Orders by (distance, period): ties go to the earlier period.
bool nearer(const Candidate& a, const Candidate& b);

/// Weights exp(-d^2 / (2 theta1)) on the m nearest candidates, zero
/// elsewhere, normalised to sum to one. Non-finite distances are never
/// supported. Throws DataError on an empty pool and NumericError when no
/// candidate has a finite distance.
WeightVector kernel_weights(std::span<const Candidate> candidates, double theta1, int m);

/// Same, for candidates already sorted with `nearer`.
WeightVector kernel_weights_sorted(std::span<const Candidate> sorted, double theta1, int m);

}  // namespace analogcast
