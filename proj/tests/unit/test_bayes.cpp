#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/inverse_gamma.hpp>
#include <boost/math/distributions/uniform.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "analogcast/bayes.hpp"
#include "analogcast/error.hpp"
#include "analogcast/simulate.hpp"
#include "support.hpp"

namespace analogcast {
namespace {

/// Residual source that ignores the parameters.
class FlatModel : public ResidualModel {
 public:
  explicit FlatModel(ResidualSummary r) : r_(r) {}
  ResidualSummary residuals(const ModelState&) override {
    ++calls;
    return r_;
  }
  int calls = 0;

 private:
  ResidualSummary r_;
};

/// One-dimensional forcing with zero lag: the depth-2 Euclidean distance
/// between periods t and l is sqrt(2) |beta_t - beta_l|.
struct ScalarSetup {
  std::shared_ptr<const EmbeddingLibrary> library;
  std::shared_ptr<const DistanceTable> table;
  Eigen::MatrixXd responses;
};

ScalarSetup scalar_setup(const Eigen::RowVectorXd& beta, const Eigen::MatrixXd& responses) {
  ScalarSetup s;
  s.library = std::make_shared<const EmbeddingLibrary>(Eigen::MatrixXd(beta), 0, 2);
  s.table = std::make_shared<const DistanceTable>(s.library, DistanceKind::kEuclidean);
  s.responses = responses;
  return s;
}

AnalogSimSpec small_sim(std::uint64_t seed) {
  AnalogSimSpec spec;
  spec.n_time = 60;
  spec.q_max = 6;
  spec.t_start = 10;
  spec.t_end = 50;
  spec.n_forecasts = 5;
  spec.p_forcing = 4;
  spec.truth = ModelState{0.1, 3, 3, 0.05, 1.0};
  spec.sweeps = 3;
  spec.seed = seed;
  return spec;
}

PriorConfig small_priors() {
  PriorConfig p;
  p.m_max = 6;
  p.q_max = 6;
  return p;
}

TEST(Priors, InverseGammaDensityMatchesBoost) {
  boost::math::inverse_gamma_distribution<double> ig(2.0, 1.0);
  for (double x : {0.05, 0.3, 1.0, 4.0})
    EXPECT_NEAR(inverse_gamma_log_density(x, 2.0, 1.0), std::log(boost::math::pdf(ig, x)), 1e-12);
  EXPECT_EQ(inverse_gamma_log_density(0.0, 2.0, 1.0), -std::numeric_limits<double>::infinity());
}

TEST(Priors, ValidationAndSupport) {
  PriorConfig p;
  EXPECT_NO_THROW(p.validate());
  p.q_min = 1;
  EXPECT_THROW(p.validate(), ConfigError);
  p = PriorConfig{};
  p.theta1_rate = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = PriorConfig{};
  const ModelState s = initial_state(p);
  EXPECT_TRUE(in_support(s, p));
  EXPECT_NEAR(s.theta1, 1.0 / 3.0, 1e-15);
  ModelState bad = s;
  bad.m = 16;
  EXPECT_FALSE(in_support(bad, p));
  bad = s;
  bad.sigma2 = 0.0;
  EXPECT_FALSE(in_support(bad, p));
}

TEST(AnalogMean, SingleNeighbourReturnsItsFuture) {
  Eigen::RowVectorXd beta(12);
  beta << 0.3, -1.0, 0.9, 0.45, 2.0, 0.1, -0.2, 0.7, 1.4, 0.5, 0.0, 0.0;
  std::mt19937_64 gen(1);
  const auto s = scalar_setup(beta, testing::random_matrix(2, 12, gen));
  const auto index = build_training_index(*s.library, 1, 9, 2, 2);
  const AnalogModel model(s.table, s.responses, index);
  const std::vector<int> cands{1, 2, 3, 4, 5, 6};
  // beta_10 = 0.5 is nearest to beta_4 = 0.45.
  const auto mean = model.analog_mean(ModelState{0.4, 1, 2, 1.0, 1.0}, 10, cands);
  EXPECT_EQ(mean, s.responses.col(4 + 2 - 1));
}

TEST(AnalogMean, IdenticalCandidatesAverage) {
  Eigen::RowVectorXd beta(10);
  beta << 1.0, 1.0, 1.0, 1.0, 5.0, 6.0, 7.0, 8.0, 1.0, 9.0;
  std::mt19937_64 gen(2);
  const auto s = scalar_setup(beta, testing::random_matrix(3, 10, gen));
  const auto index = build_training_index(*s.library, 1, 8, 1, 2);
  const AnalogModel model(s.table, s.responses, index);
  const std::vector<int> cands{1, 2, 3, 4};
  const auto mean = model.analog_mean(ModelState{0.05, 4, 2, 1.0, 1.0}, 9, cands);
  const Eigen::VectorXd expected = s.responses.middleCols(1, 4).rowwise().mean();
  EXPECT_LT((mean - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(AnalogMean, FiveCandidateHandComputation) {
  Eigen::RowVectorXd beta(12);
  beta << 0.1, -0.25, 0.3, 0.05, -0.6, 3.0, 3.0, 3.0, 3.0, 0.0, 3.0, 3.0;
  std::mt19937_64 gen(3);
  const auto s = scalar_setup(beta, testing::random_matrix(2, 12, gen));
  const auto index = build_training_index(*s.library, 1, 10, 1, 2);
  const AnalogModel model(s.table, s.responses, index);
  // theta1 = 0.2, m = 4: d^2 = 2 beta^2, so exp(-d^2 / (2 theta1)) = exp(-beta^2 / 0.2).
  const std::vector<int> cands{1, 2, 3, 4, 5};
  const auto mean = model.analog_mean(ModelState{0.2, 4, 2, 1.0, 1.0}, 10, cands);
  const double w1 = std::exp(-0.05), w2 = std::exp(-0.3125), w3 = std::exp(-0.45), w4 = std::exp(-0.0125);
  const double z = w1 + w2 + w3 + w4;
  for (int i = 0; i < 2; ++i) {
    const double oracle = (w1 * s.responses(i, 1) + w2 * s.responses(i, 2) + w3 * s.responses(i, 3) +
                           w4 * s.responses(i, 4)) / z;
    EXPECT_NEAR(mean(i), oracle, 1e-12);
  }
}

TEST(AnalogMean, UnresolvableCandidateIsRejected) {
  Eigen::RowVectorXd beta = Eigen::RowVectorXd::LinSpaced(10, 0.0, 1.0);
  std::mt19937_64 gen(4);
  const auto s = scalar_setup(beta, testing::random_matrix(1, 10, gen));
  const auto index = build_training_index(*s.library, 1, 8, 2, 2);
  const AnalogModel model(s.table, s.responses, index);
  const std::vector<int> cands{2, 9};
  EXPECT_THROW(model.analog_mean(ModelState{0.2, 2, 2, 1.0, 1.0}, 5, cands), DataError);
}

TEST(AnalogMean, InvariantToCandidateOrder) {
  const auto sim = simulate_analog_data(small_sim(5));
  const AnalogModel model(sim.distances, sim.responses, sim.index);
  std::mt19937_64 gen(5);
  const ModelState state{0.08, 4, 5, 0.05, 1.0};
  for (int t : {20, 35, 44}) {
    auto cands = sim.index.candidates(t);
    const auto a = model.analog_mean(state, t, cands);
    for (int k = 0; k < 5; ++k) {
      std::shuffle(cands.begin(), cands.end(), gen);
      EXPECT_LT((model.analog_mean(state, t, cands) - a).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(LogLikelihood, ZeroResidualFormulas) {
  const double n_tr = 37, p_alpha = 3;
  const ResidualSummary zero{0.0, static_cast<std::size_t>(n_tr * p_alpha)};
  const double l1 = gaussian_log_likelihood(zero, 1.0);
  EXPECT_NEAR(l1, -(n_tr * p_alpha / 2.0) * std::log(2.0 * std::numbers::pi), 1e-10);
  EXPECT_NEAR(l1 - gaussian_log_likelihood(zero, 2.0), (n_tr * p_alpha / 2.0) * std::log(2.0), 1e-10);
  EXPECT_EQ(gaussian_log_likelihood(zero, 0.0), -std::numeric_limits<double>::infinity());
}

TEST(LogLikelihood, ConstantResponsesGiveZeroResiduals) {
  Eigen::RowVectorXd beta = Eigen::RowVectorXd::LinSpaced(20, -1.0, 2.0);
  const Eigen::MatrixXd responses = Eigen::MatrixXd::Constant(2, 20, 0.7);
  const auto s = scalar_setup(beta, responses);
  const auto index = build_training_index(*s.library, 2, 18, 2, 2);
  AnalogModel model(s.table, s.responses, index);
  const auto r = model.residuals(ModelState{0.3, 3, 2, 1.0, 1.0});
  EXPECT_EQ(r.n_obs, index.training_periods.size() * 2);
  EXPECT_NEAR(r.sum_sq, 0.0, 1e-24);
  EXPECT_NEAR(model.log_likelihood(ModelState{0.3, 3, 2, 1.0, 1.0}),
              -(static_cast<double>(r.n_obs) / 2.0) * std::log(2.0 * std::numbers::pi), 1e-10);
}

TEST(LogLikelihood, MatchesDirectDensitySummation) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto sim = simulate_analog_data(small_sim(seed));
    AnalogModel model(sim.distances, sim.responses, sim.index);
    const ModelState state{0.15, 2 + static_cast<int>(seed), 2 + static_cast<int>(seed), 0.07, 1.0};
    double oracle = 0.0;
    for (int t : sim.index.training_periods) {
      const auto cands = sim.index.candidates(t);
      // Brute-force weights straight from the library embeddings.
      std::vector<std::pair<double, int>> d;
      for (int l : cands)
        d.emplace_back(procrustes_distance(model.library().view(t, state.q), model.library().view(l, state.q)), l);
      std::sort(d.begin(), d.end());
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(sim.responses.rows());
      double z = 0.0;
      for (int k = 0; k < state.m; ++k) {
        const double w = std::exp(-(d[k].first * d[k].first) / (2.0 * state.theta1));
        mean += w * sim.responses.col(d[k].second + sim.index.lead - 1);
        z += w;
      }
      mean /= z;
      for (Eigen::Index i = 0; i < mean.size(); ++i) {
        const double r = sim.responses(i, t + sim.index.lead - 1) - mean(i);
        oracle += -0.5 * std::log(2.0 * std::numbers::pi * state.sigma2) - r * r / (2.0 * state.sigma2);
      }
    }
    EXPECT_NEAR(model.log_likelihood(state), oracle, 1e-10 * std::max(1.0, std::abs(oracle)));
  }
}

TEST(LogLikelihood, CombinedWithFullForcingShareEqualsProcrustes) {
  const auto sim = simulate_analog_data(small_sim(6));
  auto response_lib = std::make_shared<const EmbeddingLibrary>(sim.responses, 1, 6);
  auto response_table = std::make_shared<const DistanceTable>(response_lib, DistanceKind::kProcrustes);
  AnalogModel plain(sim.distances, sim.responses, sim.index);
  AnalogModel combined(sim.distances, sim.responses, sim.index, response_table);
  EXPECT_EQ(combined.distance_kind(), DistanceKind::kCombined);
  const ModelState s{0.2, 3, 4, 0.1, 1.0};
  EXPECT_NEAR(combined.residuals(s).sum_sq, plain.residuals(s).sum_sq, 1e-10);
  ModelState mixed = s;
  mixed.gamma = 0.3;
  EXPECT_NE(combined.residuals(mixed).sum_sq, plain.residuals(s).sum_sq);
}

TEST(Sampler, ForcedProposalIsAccepted) {
  FlatModel flat({10.0, 50});
  SamplerConfig cfg;
  cfg.theta1_log_step = 0.0;
  Sampler sampler(flat, PriorConfig{}, cfg);
  const ModelState start{0.7, 4, 9, 0.3, 1.0};
  sampler.reset(start);
  Rng rng(1);
  EXPECT_TRUE(sampler.update_theta1(rng));
  EXPECT_EQ(sampler.state(), start);
  EXPECT_EQ(sampler.theta1_acceptance.accepted, 1);
}

TEST(Sampler, ThetaAcceptanceMatchesPriorRatio) {
  const PriorConfig priors;
  const double sd = 1.0;
  for (double theta0 : {0.02, 5.0}) {
    // Acceptance probability of the log-scale walk under the prior alone:
    // E_z min(1, pi(theta0 e^z) e^z / pi(theta0)), z ~ N(0, sd^2), by Simpson's rule.
    const int n = 40000;
    const double lo = -10.0 * sd, h = 20.0 * sd / n;
    double oracle = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double z = lo + i * h;
      const double log_ratio = inverse_gamma_log_density(theta0 * std::exp(z), 2.0, 1.0) -
                               inverse_gamma_log_density(theta0, 2.0, 1.0) + z;
      const double f = std::exp(-0.5 * z * z / (sd * sd)) / (sd * std::sqrt(2.0 * std::numbers::pi)) *
                       std::min(1.0, std::exp(log_ratio));
      oracle += f * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
    }
    oracle *= h / 3.0;

    FlatModel flat({3.0, 20});
    SamplerConfig cfg;
    cfg.theta1_log_step = sd;
    Sampler sampler(flat, priors, cfg);
    Rng rng(7);
    const int trials = 10000;
    int accepted = 0;
    for (int k = 0; k < trials; ++k) {
      sampler.reset(ModelState{theta0, 3, 5, 1.0, 1.0});
      accepted += sampler.update_theta1(rng) ? 1 : 0;
    }
    const double rate = static_cast<double>(accepted) / trials;
    const double se = std::sqrt(oracle * (1.0 - oracle) / trials);
    EXPECT_NEAR(rate, oracle, 4.0 * se) << "theta0 = " << theta0;
  }
}

double chi_square_p_value(const std::vector<long>& counts) {
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), 0L));
  const double expected = total / static_cast<double>(counts.size());
  double stat = 0.0;
  for (long c : counts) stat += (c - expected) * (c - expected) / expected;
  boost::math::chi_squared_distribution<double> chi(static_cast<double>(counts.size() - 1));
  return boost::math::cdf(boost::math::complement(chi, stat));
}

/// Kolmogorov-Smirnov statistic of `draws` against `cdf`.
template <class Cdf>
double ks_statistic(std::vector<double> draws, Cdf cdf) {
  std::sort(draws.begin(), draws.end());
  const double n = static_cast<double>(draws.size());
  double d = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double f = cdf(draws[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

TEST(Sampler, ConstantLikelihoodRecoversPriors) {
  PriorConfig priors;
  priors.sample_gamma = true;
  FlatModel flat({4.0, 30});
  SamplerConfig cfg;
  // The +-1 walk over 23 depths decorrelates over roughly a hundred sweeps;
  // thinning keeps the goodness-of-fit tests on near-independent draws.
  const int draws = 10000, thin = 100;
  cfg.burn_in = 500;
  cfg.iterations = cfg.burn_in + draws * thin;
  cfg.seed = 11;
  const auto chain = run_chain(flat, priors, cfg);
  const auto kept = chain.retained();
  std::vector<long> m_counts(15, 0), q_counts(23, 0);
  std::vector<double> theta, gamma;
  for (std::size_t i = thin - 1; i < kept.size(); i += thin) {
    ++m_counts[static_cast<std::size_t>(kept[i].m - 1)];
    ++q_counts[static_cast<std::size_t>(kept[i].q - 2)];
    theta.push_back(kept[i].theta1);
    gamma.push_back(kept[i].gamma);
  }
  ASSERT_EQ(theta.size(), static_cast<std::size_t>(draws));
  EXPECT_GT(chi_square_p_value(m_counts), 0.01);
  EXPECT_GT(chi_square_p_value(q_counts), 0.01);
  // KS critical value at the 1% level.
  const double critical = 1.628 / std::sqrt(static_cast<double>(draws));
  boost::math::inverse_gamma_distribution<double> ig(2.0, 1.0);
  EXPECT_LT(ks_statistic(theta, [&](double x) { return boost::math::cdf(ig, x); }), critical);
  EXPECT_LT(ks_statistic(gamma, [](double x) { return x; }), critical);
  for (double lp : chain.log_posterior) ASSERT_TRUE(std::isfinite(lp));
}

TEST(Sampler, UniformIntegerProposalRecoversPriors) {
  PriorConfig priors;
  FlatModel flat({4.0, 30});
  SamplerConfig cfg;
  cfg.int_proposal = IntProposal::kUniform;
  cfg.burn_in = 100;
  cfg.iterations = 10100;
  cfg.seed = 12;
  const auto chain = run_chain(flat, priors, cfg);
  std::vector<long> m_counts(15, 0), q_counts(23, 0);
  for (const auto& s : chain.retained()) {
    ++m_counts[static_cast<std::size_t>(s.m - 1)];
    ++q_counts[static_cast<std::size_t>(s.q - 2)];
  }
  EXPECT_GT(chi_square_p_value(m_counts), 0.01);
  EXPECT_GT(chi_square_p_value(q_counts), 0.01);
}

TEST(Sampler, SigmaDrawsMatchInverseGammaConditional) {
  const ResidualSummary r{12.5, 200};
  FlatModel flat(r);
  const PriorConfig priors;
  Sampler sampler(flat, priors, SamplerConfig{});
  sampler.reset(initial_state(priors));
  Rng rng(13);
  const int n = 10000;
  std::vector<double> draws(n);
  for (auto& d : draws) {
    sampler.update_sigma2(rng);
    d = sampler.state().sigma2;
  }
  std::sort(draws.begin(), draws.end());
  boost::math::inverse_gamma_distribution<double> ig(priors.sigma2_shape + 100.0, priors.sigma2_rate + 6.25);
  std::vector<double> theory(n);
  for (int i = 0; i < n; ++i) theory[i] = boost::math::quantile(ig, (i + 0.5) / n);
  const Eigen::Map<const Eigen::VectorXd> a(draws.data(), n), b(theory.data(), n);
  const Eigen::VectorXd ac = a.array() - a.mean(), bc = b.array() - b.mean();
  EXPECT_GT(ac.dot(bc) / (ac.norm() * bc.norm()), 0.999);
}

TEST(Sampler, ResetOutsideSupportThrows) {
  FlatModel flat({1.0, 10});
  Sampler sampler(flat, PriorConfig{}, SamplerConfig{});
  EXPECT_THROW(sampler.reset(ModelState{1.0, 0, 5, 1.0, 1.0}), ConfigError);
  SamplerConfig bad;
  bad.burn_in = bad.iterations;
  EXPECT_THROW(Sampler(flat, PriorConfig{}, bad), ConfigError);
}

TEST(Sampler, MwgStepStaysInSupport) {
  const auto sim = simulate_analog_data(small_sim(8));
  AnalogModel model(sim.distances, sim.responses, sim.index);
  const auto priors = small_priors();
  Rng rng(8);
  ModelState s = initial_state(priors);
  for (int k = 0; k < 200; ++k) {
    const auto step = mwg_step(model, s, rng, priors, SamplerConfig{});
    ASSERT_TRUE(in_support(step.state, priors));
    ASSERT_TRUE(std::isfinite(step.diagnostics.log_posterior));
    s = step.state;
  }
}

TEST(RunChain, FixedSeedIsDeterministic) {
  const auto sim = simulate_analog_data(small_sim(9));
  const auto priors = small_priors();
  SamplerConfig cfg;
  cfg.iterations = 300;
  cfg.burn_in = 50;
  cfg.seed = 99;
  AnalogModel a(sim.distances, sim.responses, sim.index);
  AnalogModel b(sim.distances, sim.responses, sim.index);
  const auto ca = run_chain(a, priors, cfg);
  const auto cb = run_chain(b, priors, cfg);
  EXPECT_EQ(ca.states, cb.states);
  EXPECT_EQ(ca.log_posterior, cb.log_posterior);
  EXPECT_EQ(ca.states.size(), 300u);
  EXPECT_EQ(ca.retained().size(), 250u);
  cfg.seed = 100;
  AnalogModel c(sim.distances, sim.responses, sim.index);
  EXPECT_NE(run_chain(c, priors, cfg).states, ca.states);
}

TEST(RunChain, SingleRetainedStateBoundary) {
  FlatModel flat({1.0, 10});
  SamplerConfig cfg;
  cfg.iterations = 21;
  cfg.burn_in = 20;
  const auto chain = run_chain(flat, PriorConfig{}, cfg);
  EXPECT_EQ(chain.states.size(), 21u);
  EXPECT_EQ(chain.retained().size(), 1u);
  EXPECT_EQ(&chain.retained()[0], &chain.states.back());
}

TEST(RunChain, SaveLoadRoundTrip) {
  testing::TempDir dir("chain");
  const auto sim = simulate_analog_data(small_sim(10));
  AnalogModel model(sim.distances, sim.responses, sim.index);
  PriorConfig priors = small_priors();
  priors.sample_gamma = true;
  SamplerConfig cfg;
  cfg.iterations = 60;
  cfg.burn_in = 10;
  const auto chain = run_chain(model, priors, cfg);
  save_chain(dir / "chain.csv", chain);
  const auto loaded = load_chain(dir / "chain.csv", 10);
  EXPECT_EQ(loaded.states, chain.states);
  EXPECT_EQ(loaded.log_posterior, chain.log_posterior);
  EXPECT_EQ(testing::read_text(dir / "chain.csv").substr(0, 38), "iter,theta1,m,q,sigma2,gamma,log_post\n");
  EXPECT_THROW(load_chain(dir / "chain.csv", 60), DataError);
  testing::write_text(dir / "bad.csv", "iter,theta1\n1,2\n");
  EXPECT_THROW(load_chain(dir / "bad.csv", 0), DataError);
  testing::write_text(dir / "bad2.csv", "iter,theta1,m,q,sigma2,gamma,log_post\n1,0.5,x,3,1,1,0\n");
  EXPECT_THROW(load_chain(dir / "bad2.csv", 0), DataError);
}

/// Residual surface with a unique grid minimum at (m, q, theta factor) = (4, 7, 3).
class BowlModel : public ResidualModel {
 public:
  ResidualSummary residuals(const ModelState& s) override {
    const double lt = std::log(s.theta1 / (1.0 / 3.0)) - std::log(3.0);
    return {1.0 + (s.m - 4) * (s.m - 4) + 0.5 * (s.q - 7) * (s.q - 7) + lt * lt, 40};
  }
};

TEST(InitialState, SearchFindsGridMinimum) {
  BowlModel bowl;
  const auto s = search_initial_state(bowl, PriorConfig{});
  EXPECT_EQ(s.m, 4);
  EXPECT_EQ(s.q, 7);
  EXPECT_NEAR(s.theta1, 1.0, 1e-12);
  EXPECT_NEAR(s.sigma2, 1.0 / 40.0, 1e-12);
  EXPECT_TRUE(in_support(s, PriorConfig{}));
}

TEST(InitialState, TiesGoToFirstScannedState) {
  FlatModel flat({2.0, 8});
  PriorConfig priors;
  const auto s = search_initial_state(flat, priors);
  EXPECT_EQ(s.q, priors.q_min);
  EXPECT_EQ(s.m, priors.m_min);
  EXPECT_NEAR(s.theta1, 0.03 / 3.0, 1e-15);
  EXPECT_NEAR(s.sigma2, 0.25, 1e-15);
  EXPECT_EQ(flat.calls, 15 * 23 * 6);
}

/// A basis of `p` orthonormal columns over `n_loc` locations.
std::shared_ptr<const BasisSet> random_basis(int n_loc, int p, std::mt19937_64& gen) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(testing::random_matrix(n_loc, p, gen));
  const Eigen::MatrixXd phi = qr.householderQ() * Eigen::MatrixXd::Identity(n_loc, p);
  return std::make_shared<const BasisSet>(phi, BasisKind::kEof, std::vector<Coord>(n_loc));
}

TEST(PosteriorPredict, FieldMeanIsBasisTimesCoefficientMean) {
  const auto sim = simulate_analog_data(small_sim(14));
  AnalogModel model(sim.distances, sim.responses, sim.index);
  SamplerConfig cfg;
  cfg.iterations = 400;
  cfg.burn_in = 100;
  const auto chain = run_chain(model, small_priors(), cfg);
  std::mt19937_64 gen(14);
  const auto basis = random_basis(9, 3, gen);
  PredictOptions opts;
  opts.seed = 3;
  const auto f = posterior_predict(chain, model, sim.forecast_periods.front(), *basis, opts);
  EXPECT_EQ(f.coeff_draws.cols(), 60);
  EXPECT_EQ(f.target_period, f.initial_period + sim.index.lead);
  EXPECT_LT((f.field_mean - basis->matrix() * f.coeff_mean).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((f.field_draws.rowwise().mean() - f.field_mean).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_TRUE((f.field_lower.array() <= f.field_upper.array()).all());
  EXPECT_TRUE((f.coeff_lower.array() <= f.coeff_upper.array()).all());
  opts.n_draws = 500;
  EXPECT_EQ(posterior_predict(chain, model, sim.forecast_periods.front(), *basis, opts).coeff_draws.cols(), 500);
}

TEST(PosteriorPredict, DegenerateChainGivesNearestAnalogField) {
  const auto sim = simulate_analog_data(small_sim(15));
  AnalogModel model(sim.distances, sim.responses, sim.index);
  Chain chain;
  chain.states = {ModelState{0.5, 1, 4, 0.0, 1.0}};
  chain.log_posterior = {0.0};
  std::mt19937_64 gen(15);
  const auto basis = random_basis(7, 3, gen);
  const int period = sim.forecast_periods.back();
  PredictOptions opts;
  opts.n_draws = 20;
  const auto f = posterior_predict(chain, model, period, *basis, opts);
  const auto cands = forecast_candidates(model.library(), period, sim.index.t_end, sim.index.lead, sim.index.q_max);
  int best = cands.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (int l : cands) {
    const double d = procrustes_distance(model.library().view(period, 4), model.library().view(l, 4));
    if (d < best_d) best_d = d, best = l;
  }
  const Eigen::VectorXd expected = basis->matrix() * sim.responses.col(best + sim.index.lead - 1);
  for (Eigen::Index j = 0; j < f.field_draws.cols(); ++j)
    EXPECT_LT((f.field_draws.col(j) - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PosteriorPredict, Errors) {
  const auto sim = simulate_analog_data(small_sim(16));
  AnalogModel model(sim.distances, sim.responses, sim.index);
  Chain chain;
  chain.states = {ModelState{0.5, 2, 3, 0.1, 1.0}};
  chain.log_posterior = {0.0};
  std::mt19937_64 gen(16);
  EXPECT_THROW(posterior_predict(chain, model, 2, *random_basis(5, 3, gen)), DataError);
  EXPECT_THROW(posterior_predict(chain, model, 55, *random_basis(5, 2, gen)), DataError);
  PredictOptions opts;
  opts.thin = 0;
  EXPECT_THROW(posterior_predict(chain, model, 55, *random_basis(5, 3, gen), opts), ConfigError);
}

TEST(RowQuantile, Type7Interpolation) {
  Eigen::MatrixXd d(1, 5);
  d << 5, 1, 4, 2, 3;
  EXPECT_DOUBLE_EQ(row_quantile(d, 0.5)(0), 3.0);
  EXPECT_DOUBLE_EQ(row_quantile(d, 0.0)(0), 1.0);
  EXPECT_DOUBLE_EQ(row_quantile(d, 1.0)(0), 5.0);
  EXPECT_DOUBLE_EQ(row_quantile(d, 0.1)(0), 1.4);
}

}  // namespace
}  // namespace analogcast
