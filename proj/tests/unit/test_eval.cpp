#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "analogcast/error.hpp"
#include "analogcast/eval.hpp"
#include "support.hpp"

namespace analogcast {
namespace {

using testing::random_matrix;

TEST(Mse, Examples) {
  std::mt19937_64 gen(1);
  const auto y = random_matrix(5, 7, gen);
  EXPECT_EQ(mse(y, y), 0.0);
  const Eigen::MatrixXd shifted = y.array() + 0.3;
  EXPECT_NEAR(mse(y, shifted), 0.09, 1e-15);
  EXPECT_THROW(mse(y, random_matrix(5, 6, gen)), DataError);
  EXPECT_THROW(mse(Eigen::MatrixXd(0, 0), Eigen::MatrixXd(0, 0)), DataError);
}

TEST(Mse, MatchesElementwiseSummation) {
  std::mt19937_64 gen(2);
  std::uniform_int_distribution<int> dim(1, 30);
  for (int trial = 0; trial < 200; ++trial) {
    const int n_y = dim(gen), n = dim(gen);
    const auto y = random_matrix(n_y, n, gen), p = random_matrix(n_y, n, gen);
    double sum = 0.0;
    for (int t = 0; t < n; ++t)
      for (int i = 0; i < n_y; ++i) sum += (y(i, t) - p(i, t)) * (y(i, t) - p(i, t));
    EXPECT_NEAR(mse(y, p), sum / (n * n_y), 1e-12);
    // Against a zero forecast the score is the mean squared magnitude.
    EXPECT_NEAR(mse(y, Eigen::MatrixXd::Zero(n_y, n)), y.squaredNorm() / (n * n_y), 1e-12);
  }
}

TEST(AnomalyCorrelation, Identities) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto y = random_matrix(6, 9, gen);
    EXPECT_NEAR(anomaly_correlation(y, y), 1.0, 1e-15);
    EXPECT_NEAR(anomaly_correlation(y, -y), -1.0, 1e-15);
    EXPECT_NEAR(anomaly_correlation(y, 2.0 * y), 1.0, 1e-15);
  }
}

TEST(AnomalyCorrelation, ScaleInvariance) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0.01, 100.0);
  for (int trial = 0; trial < 500; ++trial) {
    const auto y = random_matrix(4, 11, gen), p = random_matrix(4, 11, gen);
    const double base = anomaly_correlation(y, p);
    // Power-of-two factors are exact in binary floating point.
    for (double c : {0.25, 2.0, 1024.0}) EXPECT_EQ(anomaly_correlation(y, c * p), base);
    // Other factors agree up to the rounding of c * p.
    EXPECT_NEAR(anomaly_correlation(y, u(gen) * p), base, 1e-15);
    EXPECT_GE(base, -1.0);
    EXPECT_LE(base, 1.0);
  }
}

TEST(AnomalyCorrelation, AccumulatesOverTimes) {
  Eigen::MatrixXd y(2, 2), p(2, 2);
  y << 1, 0, 0, 1;
  p << 1, 1, 0, 0;
  // cross = 1, |p|^2 = 2, |y|^2 = 2.
  EXPECT_NEAR(anomaly_correlation(y, p), 0.5, 1e-15);
  EXPECT_NEAR(anomaly_correlation(y, p, AcForm::kPrinted), 0.25, 1e-15);
}

TEST(AnomalyCorrelation, PrintedFormIsNotScaleInvariant) {
  std::mt19937_64 gen(5);
  const auto y = random_matrix(3, 5, gen), p = random_matrix(3, 5, gen);
  EXPECT_NEAR(anomaly_correlation(y, 2.0 * p, AcForm::kPrinted),
              0.5 * anomaly_correlation(y, p, AcForm::kPrinted), 1e-15);
}

TEST(AnomalyCorrelation, ZeroFieldIsRejected) {
  std::mt19937_64 gen(6);
  const auto y = random_matrix(3, 4, gen);
  EXPECT_THROW(anomaly_correlation(y, Eigen::MatrixXd::Zero(3, 4)), NumericError);
  EXPECT_THROW(anomaly_correlation(Eigen::MatrixXd::Zero(3, 4), y), NumericError);
}

ModelForecasts forecast(int region, std::string model, int lead, const Eigen::MatrixXd& y,
                        const Eigen::MatrixXd& p) {
  return {region, std::move(model), lead, y, p};
}

TEST(ScoreCardTable, SingleModelIsBestEverywhere) {
  std::mt19937_64 gen(7);
  std::vector<ModelForecasts> f;
  for (int region : {1, 2, 3})
    for (int lead : {1, 6}) {
      const auto y = random_matrix(4, 5, gen);
      f.push_back(forecast(region, "BA1", lead, y, random_matrix(4, 5, gen)));
    }
  const std::vector<std::string> required{"BA1"};
  const auto card = scorecard(f, required);
  ASSERT_EQ(card.rows.size(), 6u);
  for (const auto& r : card.rows) {
    EXPECT_TRUE(r.best_mse);
    EXPECT_TRUE(r.best_ac);
    EXPECT_EQ(r.n, 5);
  }
}

TEST(ScoreCardTable, DominatedModelIsNeverFlagged) {
  std::mt19937_64 gen(8);
  std::vector<ModelForecasts> f;
  for (int region : {2, 1}) {
    const auto y = random_matrix(4, 6, gen);
    const Eigen::MatrixXd good = y + 0.1 * random_matrix(4, 6, gen);
    const Eigen::MatrixXd bad = -y + 0.1 * random_matrix(4, 6, gen);
    f.push_back(forecast(region, "M5", 3, y, bad));
    f.push_back(forecast(region, "BA1", 3, y, good));
  }
  const std::vector<std::string> required{"BA1", "M5"};
  const auto card = scorecard(f, required);
  // Sorted by region, lead, then model.
  ASSERT_EQ(card.rows.size(), 4u);
  EXPECT_EQ(card.rows[0].region, 1);
  EXPECT_EQ(card.rows[0].model, "BA1");
  for (const auto& r : card.rows) {
    EXPECT_EQ(r.best_mse, r.model == "BA1");
    EXPECT_EQ(r.best_ac, r.model == "BA1");
  }
  EXPECT_EQ(card.at(2, "M5", 3).best_mse, false);
  EXPECT_THROW(card.at(3, "M5", 3), DataError);
}

TEST(ScoreCardTable, FlagsMatchIndependentRecomputation) {
  std::mt19937_64 gen(9);
  std::vector<ModelForecasts> f;
  const std::vector<std::string> models{"BA1", "M1", "M3", "M5"};
  for (int region = 1; region <= 4; ++region)
    for (int lead : {1, 3}) {
      const auto y = random_matrix(5, 8, gen);
      for (const auto& m : models) f.push_back(forecast(region, m, lead, y, random_matrix(5, 8, gen)));
    }
  const auto card = scorecard(f, models);
  for (const auto& r : card.rows) {
    double best_mse = INFINITY, best_ac = -INFINITY;
    for (const auto& g : f)
      if (g.region == r.region && g.lead == r.lead) {
        best_mse = std::min(best_mse, mse(g.actuals, g.predictions));
        best_ac = std::max(best_ac, anomaly_correlation(g.actuals, g.predictions));
      }
    EXPECT_EQ(r.best_mse, r.mse == best_mse);
    EXPECT_EQ(r.best_ac, r.ac == best_ac);
  }
}

TEST(ScoreCardTable, TiesAreAllFlagged) {
  std::mt19937_64 gen(10);
  const auto y = random_matrix(3, 4, gen), p = random_matrix(3, 4, gen);
  const std::vector<ModelForecasts> f{forecast(1, "A", 1, y, p), forecast(1, "B", 1, y, p)};
  const std::vector<std::string> none;
  const auto card = scorecard(f, none);
  EXPECT_TRUE(card.rows[0].best_mse && card.rows[1].best_mse);
}

TEST(ScoreCardTable, MissingOrDuplicateModelIsAnError) {
  std::mt19937_64 gen(11);
  const auto y = random_matrix(3, 4, gen);
  const std::vector<ModelForecasts> f{forecast(1, "BA1", 1, y, y), forecast(2, "BA1", 1, y, y),
                                      forecast(1, "M5", 1, y, y)};
  const std::vector<std::string> required{"BA1", "M5"};
  try {
    scorecard(f, required);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("M5"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("region 2"), std::string::npos);
  }
  const std::vector<ModelForecasts> dup{forecast(1, "BA1", 1, y, y), forecast(1, "BA1", 1, y, y)};
  EXPECT_THROW(scorecard(dup, required), DataError);
}

TEST(ScoreCardTable, CsvRoundTripIsExact) {
  testing::TempDir dir("score");
  std::mt19937_64 gen(12);
  std::vector<ModelForecasts> f;
  for (int region : {1, 2})
    for (const char* m : {"BA1", "M1"}) {
      const auto y = random_matrix(4, 5, gen);
      f.push_back(forecast(region, m, 6, y, random_matrix(4, 5, gen)));
    }
  const std::vector<std::string> required{"BA1", "M1"};
  const auto card = scorecard(f, required);
  save_scorecard(dir / "card.csv", card);
  const auto loaded = load_scorecard(dir / "card.csv");
  ASSERT_EQ(loaded.rows.size(), card.rows.size());
  for (std::size_t i = 0; i < card.rows.size(); ++i) {
    EXPECT_EQ(loaded.rows[i].region, card.rows[i].region);
    EXPECT_EQ(loaded.rows[i].model, card.rows[i].model);
    EXPECT_EQ(loaded.rows[i].lead, card.rows[i].lead);
    EXPECT_EQ(loaded.rows[i].mse, card.rows[i].mse);
    EXPECT_EQ(loaded.rows[i].ac, card.rows[i].ac);
    EXPECT_EQ(loaded.rows[i].best_mse, card.rows[i].best_mse);
    EXPECT_EQ(loaded.rows[i].best_ac, card.rows[i].best_ac);
  }
  // Saving the loaded card again reproduces the file byte for byte.
  save_scorecard(dir / "again.csv", loaded);
  EXPECT_EQ(testing::read_text(dir / "again.csv"), testing::read_text(dir / "card.csv"));
  EXPECT_EQ(testing::read_text(dir / "card.csv").substr(0, 47), "region,model,lead,mse,ac,is_best_mse,is_best_ac");
  testing::write_text(dir / "bad.csv", "region,model\n");
  EXPECT_THROW(load_scorecard(dir / "bad.csv"), DataError);
}

}  // namespace
}  // namespace analogcast
