#include "analogcast/synthetic.hpp"

#include <cmath>
#include <numbers>

#include "analogcast/error.hpp"
#include "analogcast/rng.hpp"

namespace analogcast {

void SynthSpec::validate() const {
  if (n_loc_forcing < 1 || n_loc_response < 1) throw ConfigError("synthetic location counts must be positive");
  if (coupling_lag < 1) throw ConfigError("synthetic coupling lag must be positive");
  if (embedding_extent < 1) throw ConfigError("synthetic embedding extent must be positive");
  if (n_time <= coupling_lag + 3 * embedding_extent)
    throw ConfigError("synthetic n_time must exceed coupling_lag + 3 * embedding_extent (" +
                      std::to_string(coupling_lag + 3 * embedding_extent) + ")");
  if (!(nonlinearity >= 0.0)) throw ConfigError("synthetic nonlinearity must be nonnegative");
  if (!(noise_sd >= 0.0)) throw ConfigError("synthetic noise sd must be nonnegative");
  if (latent_dim < 1) throw ConfigError("synthetic latent dimension must be positive");
  if (!(persistence > 0.0 && persistence < 1.0)) throw ConfigError("synthetic persistence must lie in (0, 1)");
  if (!(cycle_length > 0.0)) throw ConfigError("synthetic cycle length must be positive");
  if (!(phase_noise >= 0.0) || !(amplitude_sd >= 0.0))
    throw ConfigError("synthetic phase noise and amplitude sd must be nonnegative");
}

namespace {

std::vector<Coord> grid(int n, double lon0, double lon1, double lat0, double lat1) {
  const int ncol = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  const int nrow = (n + ncol - 1) / ncol;
  std::vector<Coord> out;
  for (int k = 0; k < n; ++k) {
    const int r = k / ncol;
    const int c = k % ncol;
    const double fx = ncol > 1 ? static_cast<double>(c) / (ncol - 1) : 0.5;
    const double fy = nrow > 1 ? static_cast<double>(r) / (nrow - 1) : 0.5;
    out.push_back({lon0 + fx * (lon1 - lon0), lat0 + fy * (lat1 - lat0)});
  }
  return out;
}

/// Smooth unit-RMS spatial patterns, one column per mode.
Eigen::MatrixXd patterns(const std::vector<Coord>& coords, int modes, Rng& rng) {
  double lon_min = coords.front().lon, lon_max = lon_min, lat_min = coords.front().lat, lat_max = lat_min;
  for (const auto& c : coords) {
    lon_min = std::min(lon_min, c.lon);
    lon_max = std::max(lon_max, c.lon);
    lat_min = std::min(lat_min, c.lat);
    lat_max = std::max(lat_max, c.lat);
  }
  const double lon_span = std::max(lon_max - lon_min, 1e-9);
  const double lat_span = std::max(lat_max - lat_min, 1e-9);
  const auto n = static_cast<Eigen::Index>(coords.size());
  Eigen::MatrixXd out(n, modes);
  for (int j = 0; j < modes; ++j) {
    const double kx = rng.uniform(0.5, 2.5) * std::numbers::pi;
    const double ky = rng.uniform(0.5, 2.5) * std::numbers::pi;
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& c = coords[static_cast<std::size_t>(i)];
      out(i, j) = std::cos(kx * (c.lon - lon_min) / lon_span + ky * (c.lat - lat_min) / lat_span + phase);
    }
    const double rms = out.col(j).norm() / std::sqrt(static_cast<double>(n));
    if (rms > 0.0) out.col(j) /= rms;
  }
  return out;
}

Eigen::VectorXd quadratic_features(const Eigen::VectorXd& z) {
  const auto k = z.size();
  Eigen::VectorXd out(k * (k + 1) / 2);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i; j < k; ++j) out(idx++) = z(i) * z(j) - (i == j ? 1.0 : 0.0);
  return out;
}

}  // namespace

SynthResult generate_synthetic(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const int k = spec.latent_dim;
  const int spin_up = 200;
  const int total = spin_up + spec.coupling_lag + spec.n_time;

  // Each latent pair is a noisy phase oscillator, sqrt(2) r (cos phi, sin phi),
  // with the amplitude r reverting to 1; a trailing odd latent is an AR(1).
  const double innovation_sd = std::sqrt(1.0 - spec.persistence * spec.persistence);
  Eigen::MatrixXd z(k, total);
  std::vector<double> phase(static_cast<std::size_t>(k / 2)), radius(phase.size(), 1.0);
  for (auto& p : phase) p = rng.uniform(0.0, 2.0 * std::numbers::pi);
  double odd = rng.normal();
  for (int t = 0; t < total; ++t) {
    for (int b = 0; b + 1 < k; b += 2) {
      auto& phi = phase[static_cast<std::size_t>(b / 2)];
      auto& r = radius[static_cast<std::size_t>(b / 2)];
      if (t > 0) {
        phi += 2.0 * std::numbers::pi / spec.cycle_length * (1.0 + 0.5 * (b / 2)) + spec.phase_noise * rng.normal();
        r = 1.0 + spec.persistence * (r - 1.0) + spec.amplitude_sd * innovation_sd * rng.normal();
      }
      z(b, t) = std::numbers::sqrt2 * r * std::cos(phi);
      z(b + 1, t) = std::numbers::sqrt2 * r * std::sin(phi);
    }
    if (k % 2 == 1) {
      if (t > 0) odd = spec.persistence * odd + innovation_sd * rng.normal();
      z(k - 1, t) = odd;
    }
  }

  const auto forcing_coords = grid(spec.n_loc_forcing, 150.0, 270.0, -20.0, 20.0);
  const auto response_coords = grid(spec.n_loc_response, -104.0, -90.0, 36.0, 44.0);
  const Eigen::MatrixXd load_forcing = patterns(forcing_coords, k, rng);
  const Eigen::MatrixXd load_linear = patterns(response_coords, k, rng);
  const Eigen::MatrixXd load_quadratic = patterns(response_coords, k * (k + 1) / 2, rng);

  const int first = spin_up + spec.coupling_lag;  // forcing time 1 in the latent path
  Eigen::MatrixXd x(spec.n_loc_forcing, spec.n_time);
  Eigen::MatrixXd y(spec.n_loc_response, spec.n_time);
  for (int t = 0; t < spec.n_time; ++t) {
    x.col(t) = load_forcing * z.col(first + t);
    const Eigen::VectorXd driver = z.col(first + t - spec.coupling_lag);
    y.col(t) = load_linear * driver + spec.nonlinearity * (load_quadratic * quadratic_features(driver));
  }
  for (int t = 0; t < spec.n_time; ++t) {
    for (int i = 0; i < spec.n_loc_forcing; ++i) x(i, t) += spec.noise_sd * rng.normal();
    for (int i = 0; i < spec.n_loc_response; ++i) y(i, t) += spec.noise_sd * rng.normal();
  }

  std::vector<TimeStamp> times;
  for (int t = 1; t <= spec.n_time; ++t) times.push_back({t, std::to_string(t)});
  FieldSeries forcing(std::move(x), forcing_coords, times);
  FieldSeries response(std::move(y), response_coords, times);
  return {to_anomalies(forcing, 1, spec.n_time, 1), to_anomalies(response, 1, spec.n_time, 1),
          z.middleCols(first, spec.n_time)};
}

}  // namespace analogcast
