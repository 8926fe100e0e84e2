#include "analogcast/baselines.hpp"

#include <cmath>

#include "analogcast/error.hpp"

namespace analogcast {

std::string_view to_string(BaselineKind kind) {
  static constexpr std::string_view names[] = {"M1", "M2", "M3", "M4", "M5", "M6", "M7", "M8"};
  return names[static_cast<int>(kind)];
}

BaselineKind parse_baseline_kind(std::string_view name) {
  for (int k = 0; k <= static_cast<int>(BaselineKind::kM8); ++k)
    if (to_string(static_cast<BaselineKind>(k)) == name) return static_cast<BaselineKind>(k);
  throw ConfigError("unknown baseline '" + std::string(name) + "' (M1 .. M7)");
}

namespace {

void check_window(const BaselineWindow& w, Eigen::Index n_time) {
  if (w.lead < 1) throw ConfigError("lead time must be >= 1");
  if (w.t_start < 1 || w.t_end < w.t_start || w.t_end > n_time)
    throw ConfigError("baseline training window [" + std::to_string(w.t_start) + ", " +
                      std::to_string(w.t_end) + "] invalid for " + std::to_string(n_time) + " periods");
  if (w.step() < w.lead)
    throw ConfigError("persistence_lag " + std::to_string(w.step()) +
                      " is shorter than the lead; it would read values after the initial period");
}

void check_initial(int period, const BaselineWindow& w, Eigen::Index n_time) {
  if (period < 1 || period > n_time)
    throw DataError("initial period " + std::to_string(period) + " outside the series");
  if (period + w.lead > n_time)
    throw DataError("target period " + std::to_string(period + w.lead) + " outside the series");
}

Eigen::VectorXd with_intercept(const Eigen::VectorXd& x) {
  Eigen::VectorXd out(x.size() + 1);
  out << 1.0, x;
  return out;
}

}  // namespace

LinearFit fit_m1(const Eigen::MatrixXd& forcing, const Eigen::MatrixXd& responses,
                 const BaselineWindow& window) {
  check_window(window, responses.cols());
  if (forcing.cols() < responses.cols()) throw DataError("forcing series shorter than responses");
  std::vector<int> periods;
  for (int t = window.t_start; t + window.lead <= window.t_end; ++t) periods.push_back(t);
  if (periods.empty()) throw DataError("M1 has no lagged training pairs");
  const auto n = static_cast<Eigen::Index>(periods.size());
  Eigen::MatrixXd x(forcing.rows() + 1, n);
  Eigen::MatrixXd y(responses.rows(), n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const int t = periods[static_cast<std::size_t>(k)];
    x.col(k) = with_intercept(forcing.col(t - 1));
    y.col(k) = responses.col(t + window.lead - 1);
  }
  Eigen::MatrixXd gram = x * x.transpose();
  LinearFit fit;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    gram.diagonal().array() += 1e-8 * gram.diagonal().mean();
    fit.ridge = true;
  }
  fit.coefficients = gram.ldlt().solve(x * y.transpose()).transpose();
  return fit;
}

AnalogueWeights constructed_analogue_weights(const Eigen::MatrixXd& library,
                                             const Eigen::VectorXd& target) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(library);
  return {cod.solve(target), cod.rank() < std::min(library.rows(), library.cols())};
}

ArFit fit_ar(const Eigen::MatrixXd& field, int order, const BaselineWindow& window) {
  if (order < 1) throw ConfigError("autoregression order must be >= 1");
  check_window(window, field.cols());
  const int step = window.step();
  const int first = window.t_start + order * step;
  const int n = window.t_end - first + 1;
  if (n < order + 2)
    throw DataError("AR(" + std::to_string(order) + ") has " + std::to_string(std::max(n, 0)) +
                    " training targets per location");
  ArFit fit;
  fit.intercept.resize(field.rows());
  fit.coefficients = Eigen::MatrixXd::Zero(field.rows(), order);
  fit.fallback.assign(static_cast<std::size_t>(field.rows()), false);
  Eigen::MatrixXd x(n, order + 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index loc = 0; loc < field.rows(); ++loc) {
    for (int k = 0; k < n; ++k) {
      const int s = first + k;
      y(k) = field(loc, s - 1);
      x(k, 0) = 1.0;
      for (int j = 1; j <= order; ++j) x(k, j) = field(loc, s - j * step - 1);
    }
    // A constant lagged input is collinear with the intercept.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < order + 1) {
      fit.intercept(loc) =
          field.row(loc).segment(window.t_start - 1, window.t_end - window.t_start + 1).mean();
      fit.fallback[static_cast<std::size_t>(loc)] = true;
      continue;
    }
    const Eigen::VectorXd b = qr.solve(y);
    fit.intercept(loc) = b(0);
    fit.coefficients.row(loc) = b.tail(order).transpose();
  }
  return fit;
}

BaselineForecast run_baseline(BaselineKind kind, const BaselineData& data,
                              const BaselineWindow& window, std::span<const int> initial_periods) {
  BaselineForecast out;
  out.kind = kind;
  for (int p : initial_periods) out.targets.push_back(p + window.lead);
  const auto n_out = static_cast<Eigen::Index>(initial_periods.size());

  switch (kind) {
    case BaselineKind::kM8:
      throw ConfigError("M8 unavailable: the random forest baseline is not provided");

    case BaselineKind::kM1:
    case BaselineKind::kM2: {
      if (!data.response_basis) throw ConfigError(std::string(to_string(kind)) + " needs a response basis");
      const auto& phi = data.response_basis->matrix();
      if (phi.cols() != data.responses.rows())
        throw DataError("response basis size does not match response coefficients");
      check_window(window, data.responses.cols());
      Eigen::MatrixXd coeffs(data.responses.rows(), n_out);
      if (kind == BaselineKind::kM1) {
        const auto fit = fit_m1(data.forcing, data.responses, window);
        if (fit.ridge) out.flags.push_back("singular design: ridge 1e-8 applied");
        for (Eigen::Index k = 0; k < n_out; ++k) {
          const int p = initial_periods[static_cast<std::size_t>(k)];
          check_initial(p, window, data.forcing.cols());
          coeffs.col(k) = fit.coefficients * with_intercept(data.forcing.col(p - 1));
        }
      } else {
        std::vector<int> periods;
        for (int t = window.t_start; t + window.lead <= window.t_end; ++t) periods.push_back(t);
        if (periods.empty()) throw DataError("M2 has no lagged training pairs");
        const auto n = static_cast<Eigen::Index>(periods.size());
        Eigen::MatrixXd library(data.forcing.rows() + 1, n);
        Eigen::MatrixXd futures(data.responses.rows(), n);
        for (Eigen::Index k = 0; k < n; ++k) {
          const int t = periods[static_cast<std::size_t>(k)];
          library.col(k) = with_intercept(data.forcing.col(t - 1));
          futures.col(k) = data.responses.col(t + window.lead - 1);
        }
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(library);
        if (cod.rank() < std::min(library.rows(), library.cols()))
          out.flags.push_back("rank-deficient library: minimum-norm weights");
        for (Eigen::Index k = 0; k < n_out; ++k) {
          const int p = initial_periods[static_cast<std::size_t>(k)];
          check_initial(p, window, data.forcing.cols());
          coeffs.col(k) = futures * cod.solve(with_intercept(data.forcing.col(p - 1)));
        }
      }
      out.field = phi * coeffs;
      return out;
    }

    case BaselineKind::kM3:
    case BaselineKind::kM4: {
      const int order = kind == BaselineKind::kM3 ? 1 : 2;
      const auto fit = fit_ar(data.response_field, order, window);
      int fallbacks = 0;
      for (bool f : fit.fallback) fallbacks += f ? 1 : 0;
      if (fallbacks > 0)
        out.flags.push_back(std::to_string(fallbacks) + " location(s) without variance: climatology used");
      const int step = window.step();
      out.field.resize(data.response_field.rows(), n_out);
      for (Eigen::Index k = 0; k < n_out; ++k) {
        const int p = initial_periods[static_cast<std::size_t>(k)];
        check_initial(p, window, data.response_field.cols());
        const int target = p + window.lead;
        if (target - order * step < 1) throw DataError("AR inputs precede the series start");
        Eigen::VectorXd y = fit.intercept;
        for (int j = 1; j <= order; ++j)
          y += fit.coefficients.col(j - 1).cwiseProduct(data.response_field.col(target - j * step - 1));
        out.field.col(k) = y;
      }
      return out;
    }

    case BaselineKind::kM5: {
      check_window(window, data.response_field.cols());
      const Eigen::VectorXd mean =
          data.response_field.middleCols(window.t_start - 1, window.t_end - window.t_start + 1).rowwise().mean();
      out.field = mean.replicate(1, n_out);
      return out;
    }

    case BaselineKind::kM6: {
      check_window(window, data.response_field.cols());
      const int step = window.step();
      out.field.resize(data.response_field.rows(), n_out);
      for (Eigen::Index k = 0; k < n_out; ++k) {
        const int p = initial_periods[static_cast<std::size_t>(k)];
        check_initial(p, window, data.response_field.cols());
        const int source = p + window.lead - step;
        if (source < 1) throw DataError("persistence source precedes the series start");
        out.field.col(k) = data.response_field.col(source - 1);
      }
      return out;
    }

    case BaselineKind::kM7: {
      if (!data.auxiliary) throw ConfigError("M7 needs an auxiliary series (config key 'auxiliary')");
      if (window.lead > 1)
        throw ConfigError("M7 is only meaningful at lead 1 (lead " + std::to_string(window.lead) + ")");
      const auto& aux = *data.auxiliary;
      if (aux.rows() != data.response_field.rows())
        throw DataError("auxiliary series has different locations from the response");
      out.field.resize(aux.rows(), n_out);
      for (Eigen::Index k = 0; k < n_out; ++k) {
        const int target = initial_periods[static_cast<std::size_t>(k)] + window.lead;
        if (target < 1 || target > aux.cols())
          throw DataError("auxiliary series has no value for period " + std::to_string(target));
        out.field.col(k) = aux.col(target - 1);
      }
      return out;
    }
  }
  throw ConfigError("unhandled baseline");
}

}  // namespace analogcast
