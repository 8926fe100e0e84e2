#include "analogcast/embedding.hpp"

#include <cstdlib>
#include <string>

#include "analogcast/error.hpp"

namespace analogcast {

EmbeddingLibrary::EmbeddingLibrary(const Eigen::MatrixXd& coeffs, int lag, int depth)
    : lag_(lag), depth_(depth), dimension_(coeffs.rows()), last_period_(static_cast<int>(coeffs.cols())) {
  if (depth < 2) throw ConfigError("embedding depth q must be >= 2");
  if (lag < 0) throw ConfigError("embedding lag h must be >= 0");
  if (coeffs.cols() < first_period())
    throw DataError("series of length " + std::to_string(coeffs.cols()) +
                    " is too short for lag " + std::to_string(lag) + " and depth " +
                    std::to_string(depth));
  entries_.reserve(static_cast<std::size_t>(size()));
  for (int t = first_period(); t <= last_period_; ++t) {
    Eigen::MatrixXd b(coeffs.rows(), depth);
    for (int j = 0; j < depth; ++j) b.col(j) = coeffs.col(t - 1 - lag * j);
    entries_.push_back(std::move(b));
  }
}

const Eigen::MatrixXd& EmbeddingLibrary::at(int period) const {
  if (!contains(period))
    throw DataError("period " + std::to_string(period) + " outside embedding library [" +
                    std::to_string(first_period()) + ", " + std::to_string(last_period_) + "]");
  return entries_[static_cast<std::size_t>(period - first_period())];
}

Eigen::Block<const Eigen::MatrixXd, Eigen::Dynamic, Eigen::Dynamic, true> EmbeddingLibrary::view(int period, int depth) const {
  if (depth < 1 || depth > depth_)
    throw ConfigError("embedding depth " + std::to_string(depth) + " exceeds library depth " +
                      std::to_string(depth_));
  return at(period).leftCols(depth);
}

EmbeddingLibrary build_library(const CoefficientSeries& series, int lag, int depth) {
  for (std::size_t k = 1; k < series.times.size(); ++k)
    if (series.times[k].index != series.times[k - 1].index + 1)
      throw DataError("embedding needs a gap-free time axis (gap after '" +
                      series.times[k - 1].label + "')");
  return EmbeddingLibrary(series.coeffs, lag, depth);
}

std::vector<int> TrainingIndex::candidates(int training_period) const {
  std::vector<int> out;
  for (int l = first_candidate(); l + lead <= t_end; ++l)
    if (std::abs(l - training_period) > exclusion_radius) out.push_back(l);
  return out;
}

TrainingIndex build_training_index(const EmbeddingLibrary& library, int t_start, int t_end,
                                   int lead, int q_max, int exclusion_radius) {
  if (lead < 1) throw ConfigError("lead time must be >= 1");
  if (q_max < 2 || q_max > library.depth())
    throw ConfigError("q_max " + std::to_string(q_max) + " must lie in [2, library depth " +
                      std::to_string(library.depth()) + "]");
  if (exclusion_radius < 0) throw ConfigError("exclusion radius must be >= 0");
  const int first = library.lag() * (q_max - 1) + 1;
  if (t_start < first)
    throw ConfigError("training start " + std::to_string(t_start) + " must be >= h(q_max-1)+1 = " +
                      std::to_string(first));
  if (t_end > library.last_period())
    throw ConfigError("training end " + std::to_string(t_end) + " beyond library end " +
                      std::to_string(library.last_period()));
  if (t_start + lead > t_end)
    throw ConfigError("no training period: need training start + lead (" +
                      std::to_string(t_start + lead) + ") <= training end (" +
                      std::to_string(t_end) + ")");
  TrainingIndex index{t_start, t_end, lead, library.lag(), q_max, exclusion_radius, {}};
  for (int t = t_start; t + lead <= t_end; ++t) index.training_periods.push_back(t);
  if (index.candidates(t_start).empty()) throw ConfigError("training candidate pool is empty");
  return index;
}

std::vector<int> forecast_candidates(const EmbeddingLibrary& library, int period,
                                     int last_known_response, int lead, int q_max) {
  if (lead < 1) throw ConfigError("lead time must be >= 1");
  std::vector<int> out;
  const int first = library.lag() * (q_max - 1) + 1;
  for (int l = first; l <= library.last_period() && l + lead <= last_known_response; ++l)
    if (l != period) out.push_back(l);
  if (out.empty()) throw DataError("forecast candidate pool is empty");
  return out;
}

}  // namespace analogcast
