#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "analogcast/basis.hpp"

namespace analogcast {

enum class BaselineKind {
  kM1,  // multivariate regression of response on forcing coefficients
  kM2,  // constructed analogue
  kM3,  // AR(1) per location
  kM4,  // AR(2) per location
  kM5,  // climatology (training mean)
  kM6,  // persistence
  kM7,  // auxiliary same-period value
  kM8,  // random forest: not provided
};

std::string_view to_string(BaselineKind kind);
BaselineKind parse_baseline_kind(std::string_view name);

/// Inputs shared by every baseline. Column t-1 holds period t throughout.
struct BaselineData {
  Eigen::MatrixXd forcing;          // p_beta x T forcing coefficients (M1, M2)
  Eigen::MatrixXd responses;        // p_alpha x T response coefficients (M1, M2)
  std::shared_ptr<const BasisSet> response_basis;  // Phi, n_loc x p_alpha (M1, M2)
  Eigen::MatrixXd response_field;   // n_loc x T (M3 to M6)
  std::optional<Eigen::MatrixXd> auxiliary;  // n_loc x T (M7)
};

/// Training uses periods [t_start, t_end]. Forecasts from initial period t'
/// target t' + lead; per-location models step `persistence_lag` periods
/// (0 means the lead), which must be at least the lead.
struct BaselineWindow {
  int t_start = 1;
  int t_end = 0;
  int lead = 1;
  int persistence_lag = 0;

  int step() const { return persistence_lag > 0 ? persistence_lag : lead; }
};

struct BaselineForecast {
  BaselineKind kind = BaselineKind::kM1;
  std::vector<int> targets;
  Eigen::MatrixXd field;           // n_loc x targets
  std::vector<std::string> flags;  // ridge, min-norm, per-location fallbacks
};

/// Runs one baseline. Reads response data only from the training window
/// and from periods at or before each initial period.
BaselineForecast run_baseline(BaselineKind kind, const BaselineData& data,
                              const BaselineWindow& window, std::span<const int> initial_periods);

/// Least-squares fit of alpha_{t+lead} on [1, beta_t] over training pairs.
struct LinearFit {
  Eigen::MatrixXd coefficients;  // p_alpha x (1 + p_beta), intercept first
  bool ridge = false;
};
LinearFit fit_m1(const Eigen::MatrixXd& forcing, const Eigen::MatrixXd& responses,
                 const BaselineWindow& window);

/// Minimum-norm weights w with library * w closest to `target`.
struct AnalogueWeights {
  Eigen::VectorXd weights;
  bool rank_deficient = false;
};
AnalogueWeights constructed_analogue_weights(const Eigen::MatrixXd& library,
                                             const Eigen::VectorXd& target);

/// Per-location OLS autoregression y_s = c + sum_k phi_k y_{s - k*step}.
struct ArFit {
  Eigen::VectorXd intercept;     // n_loc
  Eigen::MatrixXd coefficients;  // n_loc x order
  std::vector<bool> fallback;    // location fell back to the training mean
};
ArFit fit_ar(const Eigen::MatrixXd& field, int order, const BaselineWindow& window);

}  // namespace analogcast
