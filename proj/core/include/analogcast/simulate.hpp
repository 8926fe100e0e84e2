#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "analogcast/bayes.hpp"

namespace analogcast {

/// Data drawn from the analog model itself, for checking that the sampler
/// recovers known parameters.
///
/// Forcing coefficients are iid N(0, 1). Responses start as
/// N(0, anchor_sd^2); then `sweeps` passes redraw every training target
/// alpha_{t+lead} from N(analog_mean, sigma2 I) under `truth`, so the
/// training data satisfy the model's conditional law. Hold-out targets
/// are drawn once from the out-of-sample rule.
struct AnalogSimSpec {
  int n_time = 120;
  int lag = 1;
  int q_max = 24;
  int t_start = 50;
  int t_end = 110;
  int lead = 1;
  int n_forecasts = 10;
  int p_forcing = 10;
  int p_response = 3;
  double anchor_sd = 1.0;
  int sweeps = 10;
  DistanceKind distance = DistanceKind::kProcrustes;
  ModelState truth{0.1, 5, 4, 0.05, 1.0};
  std::uint64_t seed = 1;

  void validate() const;
};

struct AnalogSimData {
  Eigen::MatrixXd forcing;    // p_forcing x n_time
  Eigen::MatrixXd responses;  // p_response x n_time
  std::shared_ptr<const DistanceTable> distances;
  TrainingIndex index;
  std::vector<int> forecast_periods;  // initial periods; targets follow t_end
};

AnalogSimData simulate_analog_data(const AnalogSimSpec& spec);

}  // namespace analogcast
