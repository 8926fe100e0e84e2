#include "analogcast/simulate.hpp"

#include <cmath>

#include "analogcast/error.hpp"

namespace analogcast {

void AnalogSimSpec::validate() const {
  if (lag < 1 || q_max < 2 || lead < 1) throw ConfigError("simulation needs lag >= 1, q_max >= 2, lead >= 1");
  if (p_forcing < 1 || p_response < 1) throw ConfigError("simulation dimensions must be positive");
  if (t_start < lag * (q_max - 1) + 1) throw ConfigError("simulation t_start precedes the first embeddable period");
  if (t_end + n_forecasts > n_time) throw ConfigError("simulation hold-out runs past n_time");
  if (!(anchor_sd > 0.0) || sweeps < 1) throw ConfigError("simulation needs anchor_sd > 0 and sweeps >= 1");
  if (truth.q > q_max) throw ConfigError("true depth exceeds q_max");
}

AnalogSimData simulate_analog_data(const AnalogSimSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  AnalogSimData out;
  out.forcing.resize(spec.p_forcing, spec.n_time);
  for (Eigen::Index j = 0; j < out.forcing.cols(); ++j)
    for (Eigen::Index i = 0; i < out.forcing.rows(); ++i) out.forcing(i, j) = rng.normal();
  Eigen::MatrixXd responses(spec.p_response, spec.n_time);
  for (Eigen::Index j = 0; j < responses.cols(); ++j)
    for (Eigen::Index i = 0; i < responses.rows(); ++i) responses(i, j) = spec.anchor_sd * rng.normal();

  auto library = std::make_shared<const EmbeddingLibrary>(out.forcing, spec.lag, spec.q_max);
  const DistanceKind kind =
      spec.distance == DistanceKind::kCombined ? DistanceKind::kProcrustes : spec.distance;
  out.distances = std::make_shared<const DistanceTable>(library, kind);
  out.index = build_training_index(*library, spec.t_start, spec.t_end, spec.lead, spec.q_max);

  const double sd = std::sqrt(spec.truth.sigma2);
  for (int sweep = 0; sweep < spec.sweeps; ++sweep) {
    for (int t : out.index.training_periods) {
      // Rebuilt per target so later targets see this update through their analogs.
      const AnalogModel model(out.distances, responses, out.index);
      const auto mean = model.analog_mean(spec.truth, t, out.index.candidates(t));
      for (Eigen::Index i = 0; i < responses.rows(); ++i)
        responses(i, t + spec.lead - 1) = mean(i) + sd * rng.normal();
    }
  }

  const AnalogModel model(out.distances, responses, out.index);
  for (int k = 0; k < spec.n_forecasts; ++k) {
    const int period = spec.t_end - spec.lead + 1 + k;
    const auto cands = forecast_candidates(*library, period, spec.t_end, spec.lead, spec.q_max);
    const auto mean = model.analog_mean(spec.truth, period, cands);
    for (Eigen::Index i = 0; i < responses.rows(); ++i)
      responses(i, period + spec.lead - 1) = mean(i) + sd * rng.normal();
    out.forecast_periods.push_back(period);
  }
  out.responses = std::move(responses);
  return out;
}

}  // namespace analogcast
