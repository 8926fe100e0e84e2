#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "analogcast/basis.hpp"
#include "analogcast/embedding.hpp"
#include "analogcast/kernel.hpp"
#include "analogcast/metric.hpp"
#include "analogcast/rng.hpp"

namespace analogcast {

/// Discrete-uniform priors on m and q, inverse-gamma priors on theta1 and
/// sigma2, and an optional Unif(0, 1) prior on the distance mixing weight.
struct PriorConfig {
  int m_min = 1;
  int m_max = 15;
  int q_min = 2;
  int q_max = 24;
  double theta1_shape = 2.0;
  double theta1_rate = 1.0;
  double sigma2_shape = 0.001;
  double sigma2_rate = 0.001;
  bool sample_gamma = false;

  void validate() const;
};

/// log density of IG(shape, rate) at x.
double inverse_gamma_log_density(double x, double shape, double rate);

struct ModelState {
  double theta1 = 1.0;
  int m = 1;
  int q = 2;
  double sigma2 = 1.0;
  double gamma = 1.0;  // forcing share of the combined distance

  friend bool operator==(const ModelState&, const ModelState&) = default;
};

bool in_support(const ModelState& state, const PriorConfig& priors);

/// Prior mode for theta1, midpoints for m and q, sigma2 = 1, gamma = 0.5
/// when sampled (1 otherwise).
ModelState initial_state(const PriorConfig& priors);

enum class DistanceKind { kEuclidean, kProcrustes, kCombined };

std::string_view to_string(DistanceKind kind);
DistanceKind parse_distance_kind(std::string_view name);

/// Lazily filled table of distances between library entries, one row per
/// (depth q, target period) holding the distance to every library period.
/// Rows are computed once on first use; concurrent readers are safe, so a
/// table may be shared by chains that use the same library.
class DistanceTable {
 public:
  /// `kind` must be kEuclidean or kProcrustes.
  DistanceTable(std::shared_ptr<const EmbeddingLibrary> library, DistanceKind kind,
                ScaleNorm norm = ScaleNorm::kCentered);
  ~DistanceTable();
  DistanceTable(const DistanceTable&) = delete;
  DistanceTable& operator=(const DistanceTable&) = delete;

  const EmbeddingLibrary& library() const { return *library_; }
  DistanceKind kind() const { return kind_; }

  /// Distances from the depth-q matrix at `target` (the target) to every
  /// library period p (the comparison), at position p - library().first_period().
  std::span<const double> row(int q, int target) const;

  double distance(int q, int target, int comparison) const;

 private:
  struct Rows;
  std::shared_ptr<const EmbeddingLibrary> library_;
  DistanceKind kind_;
  ScaleNorm norm_;
  std::unique_ptr<Rows> rows_;
};

struct ResidualSummary {
  double sum_sq = 0.0;
  std::size_t n_obs = 0;
};

/// Source of training residuals for a parameter state. The sampler only
/// sees this interface, so tests can substitute a fixed summary.
class ResidualModel {
 public:
  virtual ~ResidualModel() = default;
  virtual ResidualSummary residuals(const ModelState& state) = 0;
};

/// Isotropic Gaussian log likelihood of n_obs residuals with variance sigma2.
double gaussian_log_likelihood(const ResidualSummary& r, double sigma2);

/// Unnormalised log posterior: likelihood plus log priors.
double log_posterior(const ModelState& state, const ResidualSummary& r, const PriorConfig& priors);

/// Coarse posterior-mode search used to start chains: every (m, q) in the
/// support and theta1 over a log grid around the prior mode, keeping the
/// state with the smallest residual sum of squares (ties: earlier in scan
/// order). sigma2 is set to the mean squared residual. Random-walk moves on
/// q cannot cross low-likelihood ridges between separated modes, so the
/// starting point matters.
ModelState search_initial_state(ResidualModel& model, const PriorConfig& priors);

/// The analog forecast model: the mean of alpha_{t+lead} is a kernel
/// weighted average of alpha_{l+lead} over analog periods l, with weights
/// from distances between forcing embeddings (and, for the combined
/// distance, response embeddings).
///
/// Holds per-chain caches; use one instance per chain.
class AnalogModel : public ResidualModel {
 public:
  /// `responses` is p_alpha x T with column t-1 holding period t.
  /// `response_distances` is required for DistanceKind::kCombined.
  AnalogModel(std::shared_ptr<const DistanceTable> forcing_distances, Eigen::MatrixXd responses,
              TrainingIndex index, std::shared_ptr<const DistanceTable> response_distances = nullptr);

  DistanceKind distance_kind() const;
  const TrainingIndex& index() const { return index_; }
  const Eigen::MatrixXd& responses() const { return responses_; }
  const EmbeddingLibrary& library() const { return forcing_->library(); }

  /// Kernel weights for the initial condition at `period` over `candidates`.
  WeightVector weights(const ModelState& state, int period, std::span<const int> candidates) const;

  /// sum_l w_l alpha_{l+lead}.
  Eigen::VectorXd analog_mean(const ModelState& state, int period,
                              std::span<const int> candidates) const;

  ResidualSummary residuals(const ModelState& state) override;

  double log_likelihood(const ModelState& state);

 private:
  std::vector<Candidate> distances(const ModelState& state, int period,
                                   std::span<const int> candidates) const;
  const std::vector<Candidate>& sorted_training(int q, std::size_t slot);

  std::shared_ptr<const DistanceTable> forcing_;
  std::shared_ptr<const DistanceTable> response_;
  Eigen::MatrixXd responses_;
  TrainingIndex index_;
  std::vector<int> base_candidates_;
  std::vector<std::vector<std::vector<Candidate>>> sorted_;  // [q][training slot]
};

enum class IntProposal {
  kRandomWalk,  // +-1, reflected at the support bounds
  kUniform,     // independent draw over the whole support
};

struct SamplerConfig {
  int iterations = 5000;
  int burn_in = 500;
  std::uint64_t seed = 0;
  double theta1_log_step = 1.0;  // sd of the log-scale random walk
  double gamma_step = 0.2;       // half-width of the reflected uniform walk
  IntProposal int_proposal = IntProposal::kRandomWalk;

  void validate() const;
};

struct AcceptanceCount {
  long proposed = 0;
  long accepted = 0;
  double rate() const { return proposed ? static_cast<double>(accepted) / proposed : 0.0; }
};

struct StepDiagnostics {
  bool theta1_accepted = false;
  bool m_accepted = false;
  bool q_accepted = false;
  bool gamma_accepted = false;
  double log_posterior = 0.0;
};

/// Metropolis-within-Gibbs over (sigma2, theta1, m, q, gamma). sigma2 is
/// drawn from its inverse-gamma full conditional; theta1 by a log-scale
/// random walk (Jacobian included); m and q by integer proposals; gamma by
/// a reflected uniform walk on [0, 1].
class Sampler {
 public:
  Sampler(ResidualModel& model, PriorConfig priors, SamplerConfig config);

  void reset(const ModelState& state);
  StepDiagnostics step(Rng& rng);

  void update_sigma2(Rng& rng);
  bool update_theta1(Rng& rng);
  bool update_m(Rng& rng);
  bool update_q(Rng& rng);
  bool update_gamma(Rng& rng);

  const ModelState& state() const { return state_; }
  const ResidualSummary& current_residuals() const { return current_; }
  double log_posterior() const;

  AcceptanceCount theta1_acceptance;
  AcceptanceCount m_acceptance;
  AcceptanceCount q_acceptance;
  AcceptanceCount gamma_acceptance;

 private:
  bool metropolis(const ModelState& proposal, double log_hastings, Rng& rng, AcceptanceCount& count);
  int propose_int(int value, int lo, int hi, Rng& rng, double& log_hastings) const;

  ResidualModel& model_;
  PriorConfig priors_;
  SamplerConfig config_;
  ModelState state_;
  ResidualSummary current_;
};

struct StepResult {
  ModelState state;
  StepDiagnostics diagnostics;
};

/// One full sweep from `state`.
StepResult mwg_step(ResidualModel& model, const ModelState& state, Rng& rng,
                    const PriorConfig& priors, const SamplerConfig& config);

struct Chain {
  std::vector<ModelState> states;      // every iteration, burn-in included
  std::vector<double> log_posterior;   // aligned with states
  int burn_in = 0;
  std::uint64_t seed = 0;
  AcceptanceCount theta1_acceptance;
  AcceptanceCount m_acceptance;
  AcceptanceCount q_acceptance;
  AcceptanceCount gamma_acceptance;

  std::span<const ModelState> retained() const;
};

/// Runs `config.iterations` sweeps; states after `config.burn_in` are the
/// posterior sample. Deterministic for a fixed seed.
Chain run_chain(ResidualModel& model, const PriorConfig& priors, const SamplerConfig& config,
                std::optional<ModelState> initial = std::nullopt);

/// CSV columns iter,theta1,m,q,sigma2,gamma,log_post.
void save_chain(const std::filesystem::path& path, const Chain& chain);
Chain load_chain(const std::filesystem::path& path, int burn_in);

struct PredictOptions {
  int thin = 5;                 // use every thin-th retained state
  int n_draws = 0;              // 0: one draw per thinned state
  std::uint64_t seed = 0;
  int last_known_response = 0;  // 0: the training end of the model's index
};

/// Posterior predictive sample for alpha_{t+lead} and Phi * alpha.
struct ForecastDistribution {
  int initial_period = 0;
  int target_period = 0;
  Eigen::MatrixXd coeff_draws;  // p_alpha x n_draws
  Eigen::MatrixXd field_draws;  // n_loc x n_draws
  Eigen::VectorXd coeff_mean, coeff_lower, coeff_upper;
  Eigen::VectorXd field_mean, field_lower, field_upper;  // 2.5% / 97.5%
};

ForecastDistribution posterior_predict(const Chain& chain, const AnalogModel& model,
                                       int initial_period, const BasisSet& response_basis,
                                       const PredictOptions& options = {});

/// Linear-interpolation (type 7) quantile of each row.
Eigen::VectorXd row_quantile(const Eigen::MatrixXd& draws, double prob);

}  // namespace analogcast
