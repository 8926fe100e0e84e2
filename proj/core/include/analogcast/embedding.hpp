#pragma once

#include <Eigen/Dense>
#include <vector>

#include "analogcast/basis.hpp"

namespace analogcast {

// Periods are 1-based column positions of the coefficient series: period t
// is column t-1. This matches the usual B_t, alpha_t indexing.

/// Library of p x q embedding matrices B_t = [b_t, b_{t-h}, ..., b_{t-h(q-1)}]
/// for t in [h(q-1)+1, T]. A library built at depth q also serves every
/// smaller depth: the depth-k matrix is the first k columns.
class EmbeddingLibrary {
 public:
  EmbeddingLibrary(const Eigen::MatrixXd& coeffs, int lag, int depth);

  int lag() const { return lag_; }
  int depth() const { return depth_; }
  Eigen::Index dimension() const { return dimension_; }
  int first_period() const { return first_period(depth_); }
  int first_period(int depth) const { return lag_ * (depth - 1) + 1; }
  int last_period() const { return last_period_; }
  int size() const { return last_period_ - first_period() + 1; }
  bool contains(int period) const { return period >= first_period() && period <= last_period_; }

  /// Full-depth matrix for `period`; throws DataError outside the valid range.
  const Eigen::MatrixXd& at(int period) const;
  /// The depth-`depth` matrix (first `depth` columns) for `period`.
  Eigen::Block<const Eigen::MatrixXd, Eigen::Dynamic, Eigen::Dynamic, true> view(int period,
                                                                               int depth) const;

 private:
  int lag_;
  int depth_;
  Eigen::Index dimension_;
  int last_period_;
  std::vector<Eigen::MatrixXd> entries_;
};

/// Throws DataError if the series is too short or its time axis has gaps.
EmbeddingLibrary build_library(const CoefficientSeries& series, int lag, int depth);

/// Training periods and their analog candidate sets.
///
/// Training periods t run from t_start while t + lead <= t_end, so every
/// training target alpha_{t+lead} and every analog response alpha_{l+lead}
/// lies inside the training window. Candidates for t are
/// {h(q_max-1)+1, ..., t_end} without t, without l + lead > t_end, and
/// without |l - t| <= exclusion_radius (radius 0 removes only t).
struct TrainingIndex {
  int t_start = 0;
  int t_end = 0;
  int lead = 0;
  int lag = 0;
  int q_max = 0;
  int exclusion_radius = 0;
  std::vector<int> training_periods;

  int first_candidate() const { return lag * (q_max - 1) + 1; }
  std::vector<int> candidates(int training_period) const;
};

TrainingIndex build_training_index(const EmbeddingLibrary& library, int t_start, int t_end,
                                   int lead, int q_max, int exclusion_radius = 0);

/// Out-of-sample analog pool for an initial condition at `period`: every
/// library period l >= h(q_max-1)+1 with l + lead <= last_known_response,
/// excluding `period` itself.
std::vector<int> forecast_candidates(const EmbeddingLibrary& library, int period,
                                     int last_known_response, int lead, int q_max);

}  // namespace analogcast
