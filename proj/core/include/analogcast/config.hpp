#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "analogcast/bayes.hpp"
#include "analogcast/eval.hpp"
#include "analogcast/synthetic.hpp"

namespace analogcast {

/// Everything a pipeline run needs. Stored as a flat `key = value` file;
/// `#` starts a comment and unknown keys are rejected. Empty input paths
/// default to the files `synth` writes under `out_dir`.
struct RunConfig {
  // inputs
  std::string forcing;
  std::string response;
  std::string auxiliary;
  std::string regions;
  std::string layout = "wide";
  std::string out_dir = "out";

  // anomalies: by_period 0 leaves the fields as given; a zero window end
  // means the training end
  int anomaly_period = 0;
  int clim_start = 0;
  int clim_end = 0;

  // synthetic data
  SynthSpec synth{.n_loc_response = 108};
  int synth_regions = 9;

  // bases and embeddings
  int p_alpha = 5;
  int p_beta = 12;
  int p_joint = 12;   // basis size for the multivariate EOF and CCA variants
  int cca_pre = 12;   // EOF pre-reduction before CCA
  int lag = 1;
  std::vector<int> leads{1, 3, 6};

  // windows: a zero train_start means the first embeddable period, a zero
  // train_end means n_time - holdout
  int train_start = 0;
  int train_end = 0;
  int holdout = 10;
  int exclusion_radius = 0;

  // model and sampler
  PriorConfig priors;
  std::vector<std::string> variants{"BA1"};
  DistanceKind distance = DistanceKind::kProcrustes;
  ScaleNorm scale_norm = ScaleNorm::kCentered;
  int iterations = 5000;
  int burn_in = 500;
  double theta1_step = 1.0;
  double gamma_step = 0.2;
  IntProposal int_proposal = IntProposal::kRandomWalk;
  int thin = 5;
  bool save_draws = false;

  // comparison
  std::vector<std::string> baselines{"M1", "M2", "M3", "M4", "M5", "M6"};
  int persistence_lag = 0;
  AcForm ac_form = AcForm::kCorrected;

  std::uint64_t seed = 1;
  int jobs = 0;  // 0: hardware concurrency

  /// Range checks; errors name the offending key.
  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&);
};

RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
std::string format_config(const RunConfig& config);
void save_config(const std::filesystem::path& path, const RunConfig& config);

/// Hash of every key that affects chains and forecasts (paths, out_dir and
/// jobs excluded), as 16 hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace analogcast
