#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "analogcast/field.hpp"

namespace analogcast {

/// Desk-scale nonlinear coupled system. The low-rank latent state is a set
/// of noisy phase oscillators whose amplitudes revert to one; the forcing
/// field is a linear image of the latent state, and the response at time t
/// is a linear plus `nonlinearity` times quadratic read-out of the latent
/// state at t - coupling_lag.
struct SynthSpec {
  int n_loc_forcing = 60;
  int n_loc_response = 45;
  int n_time = 200;
  int coupling_lag = 6;
  double nonlinearity = 2.0;
  double noise_sd = 0.1;
  std::uint64_t seed = 1;

  int latent_dim = 2;
  double persistence = 0.9;    // amplitude reversion per step
  double cycle_length = 16.0;  // mean steps per oscillator cycle
  double phase_noise = 0.2;    // phase innovation sd, radians per step
  double amplitude_sd = 0.2;   // stationary amplitude sd
  int embedding_extent = 24;   // longest embedding window the data must support

  void validate() const;
};

struct SynthResult {
  FieldSeries forcing;
  FieldSeries response;
  /// latent_dim x n_time, column j is the latent state at forcing time j.
  Eigen::MatrixXd latents;
};

SynthResult generate_synthetic(const SynthSpec& spec);

}  // namespace analogcast
