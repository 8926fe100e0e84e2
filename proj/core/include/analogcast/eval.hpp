#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace analogcast {

/// Mean squared error over all hold-out times and locations: the summed
/// squared error divided by N * n_y. Columns are hold-out times.
double mse(const Eigen::MatrixXd& actuals, const Eigen::MatrixXd& predictions);

enum class AcForm {
  kCorrected,  // sum y'yhat / sqrt(sum yhat'yhat * sum y'y), in [-1, 1]
  kPrinted,    // sum y'yhat / (sum yhat'yhat * sum y'y), no square root
};

/// Uncentered anomaly correlation accumulated over hold-out times.
double anomaly_correlation(const Eigen::MatrixXd& actuals, const Eigen::MatrixXd& predictions,
                           AcForm form = AcForm::kCorrected);

/// One model's hold-out forecasts for one region and lead.
struct ModelForecasts {
  int region = 1;
  std::string model;
  int lead = 1;
  Eigen::MatrixXd actuals;      // n_y x N
  Eigen::MatrixXd predictions;  // n_y x N
};

struct ScoreRow {
  int region = 1;
  std::string model;
  int lead = 1;
  double mse = 0.0;
  double ac = 0.0;
  int n = 0;
  bool best_mse = false;
  bool best_ac = false;

  friend bool operator==(const ScoreRow&, const ScoreRow&) = default;
};

/// Rows sorted by (region, lead, model). Within each (region, lead) the
/// lowest MSE and highest AC are flagged; exact ties are all flagged.
struct ScoreCard {
  std::vector<ScoreRow> rows;

  const ScoreRow& at(int region, const std::string& model, int lead) const;
};

/// Throws ConfigError if any (region, lead) lacks one of `required_models`.
ScoreCard scorecard(std::span<const ModelForecasts> forecasts,
                    std::span<const std::string> required_models, AcForm form = AcForm::kCorrected);

/// CSV columns region,model,lead,mse,ac,is_best_mse,is_best_ac.
void save_scorecard(const std::filesystem::path& path, const ScoreCard& card);
ScoreCard load_scorecard(const std::filesystem::path& path);

}  // namespace analogcast
