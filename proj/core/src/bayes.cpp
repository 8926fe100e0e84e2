#include "analogcast/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>

#include "analogcast/error.hpp"
#include "text.hpp"

namespace analogcast {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------- priors

void PriorConfig::validate() const {
  if (m_min < 1 || m_max < m_min) throw ConfigError("priors: need 1 <= m_min <= m_max");
  if (q_min < 2 || q_max < q_min) throw ConfigError("priors: need 2 <= q_min <= q_max");
  if (!(theta1_shape > 0.0) || !(theta1_rate > 0.0))
    throw ConfigError("priors: theta1 shape and rate must be positive");
  if (!(sigma2_shape > 0.0) || !(sigma2_rate > 0.0))
    throw ConfigError("priors: sigma2 shape and rate must be positive");
}

double inverse_gamma_log_density(double x, double shape, double rate) {
  if (!(x > 0.0)) return kNegInf;
  return shape * std::log(rate) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - rate / x;
}

bool in_support(const ModelState& s, const PriorConfig& p) {
  return s.theta1 > 0.0 && std::isfinite(s.theta1) && s.sigma2 > 0.0 && std::isfinite(s.sigma2) &&
         s.m >= p.m_min && s.m <= p.m_max && s.q >= p.q_min && s.q <= p.q_max &&
         s.gamma >= 0.0 && s.gamma <= 1.0;
}

ModelState initial_state(const PriorConfig& priors) {
  ModelState s;
  s.theta1 = priors.theta1_rate / (priors.theta1_shape + 1.0);
  s.m = (priors.m_min + priors.m_max) / 2;
  s.q = (priors.q_min + priors.q_max) / 2;
  s.sigma2 = 1.0;
  s.gamma = priors.sample_gamma ? 0.5 : 1.0;
  return s;
}

std::string_view to_string(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::kEuclidean:
      return "euclidean";
    case DistanceKind::kProcrustes:
      return "procrustes";
    case DistanceKind::kCombined:
      return "combined";
  }
  return "?";
}

DistanceKind parse_distance_kind(std::string_view name) {
  if (name == "euclidean") return DistanceKind::kEuclidean;
  if (name == "procrustes") return DistanceKind::kProcrustes;
  if (name == "combined") return DistanceKind::kCombined;
  throw ConfigError("unknown distance '" + std::string(name) +
                    "' (euclidean | procrustes | combined)");
}

// --------------------------------------------------------- distance table

namespace {

// Thin-QR factor of a centred embedding: B~' = Q R with R of size
// k x p, k = min(p, q). C~'T~ = Q_C (R_C R_T') Q_T', so the singular values
// of the k x k product give the Procrustes trace.
struct Reduced {
  Eigen::MatrixXd r;
  double centred_sq = 0.0;
  double raw_sq = 0.0;
};

Reduced reduce(const MatrixRef& b) {
  const Eigen::MatrixXd c = b.rowwise() - b.colwise().mean();
  Reduced out;
  out.centred_sq = c.squaredNorm();
  out.raw_sq = b.squaredNorm();
  const Eigen::Index k = std::min(c.rows(), c.cols());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(c.transpose());
  out.r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  return out;
}

}  // namespace

struct DistanceTable::Rows {
  int depth = 0;
  int periods = 0;
  std::unique_ptr<std::once_flag[]> flags;
  std::vector<std::vector<double>> data;
  std::unique_ptr<std::once_flag[]> reduced_flags;
  std::vector<std::vector<Reduced>> reduced;  // [q - 1][period - first]
};

DistanceTable::DistanceTable(std::shared_ptr<const EmbeddingLibrary> library, DistanceKind kind,
                             ScaleNorm norm)
    : library_(std::move(library)), kind_(kind), norm_(norm), rows_(std::make_unique<Rows>()) {
  if (!library_) throw ConfigError("distance table needs a library");
  if (kind == DistanceKind::kCombined)
    throw ConfigError("distance table holds one distance kind; combine two tables instead");
  rows_->depth = library_->depth();
  rows_->periods = library_->size();
  const auto n = static_cast<std::size_t>(rows_->depth) * static_cast<std::size_t>(rows_->periods);
  rows_->flags = std::make_unique<std::once_flag[]>(n);
  rows_->data.resize(n);
  rows_->reduced_flags = std::make_unique<std::once_flag[]>(static_cast<std::size_t>(rows_->depth));
  rows_->reduced.resize(static_cast<std::size_t>(rows_->depth));
}

DistanceTable::~DistanceTable() = default;

std::span<const double> DistanceTable::row(int q, int target) const {
  if (q < 1 || q > rows_->depth)
    throw ConfigError("depth " + std::to_string(q) + " outside distance table range [1, " +
                      std::to_string(rows_->depth) + "]");
  if (!library_->contains(target))
    throw DataError("period " + std::to_string(target) + " outside embedding library");
  const int first = library_->first_period();
  const auto slot = static_cast<std::size_t>(q - 1) * static_cast<std::size_t>(rows_->periods) +
                    static_cast<std::size_t>(target - first);
  std::call_once(rows_->flags[slot], [&] {
    std::vector<double> out(static_cast<std::size_t>(rows_->periods));
    const auto t = library_->view(target, q);
    if (kind_ == DistanceKind::kEuclidean) {
      for (int p = first; p <= library_->last_period(); ++p)
        out[static_cast<std::size_t>(p - first)] = euclidean_distance(t, library_->view(p, q));
    } else {
      auto& factors = rows_->reduced[static_cast<std::size_t>(q - 1)];
      std::call_once(rows_->reduced_flags[static_cast<std::size_t>(q - 1)], [&] {
        factors.reserve(static_cast<std::size_t>(rows_->periods));
        for (int p = first; p <= library_->last_period(); ++p) factors.push_back(reduce(library_->view(p, q)));
      });
      const auto& ft = factors[static_cast<std::size_t>(target - first)];
      for (int p = first; p <= library_->last_period(); ++p) {
        const auto& fc = factors[static_cast<std::size_t>(p - first)];
        double& d = out[static_cast<std::size_t>(p - first)];
        if (!(fc.centred_sq > 1e-28 * fc.raw_sq) || fc.centred_sq == 0.0) {
          d = std::numeric_limits<double>::infinity();
          continue;
        }
        const Eigen::MatrixXd m = fc.r * ft.r.transpose();
        const double trace = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues().sum();
        const double scale = trace / (norm_ == ScaleNorm::kCentered ? fc.centred_sq : fc.raw_sq);
        const double d_sq = ft.centred_sq - 2.0 * scale * trace + scale * scale * fc.centred_sq;
        d = d_sq < 1e-6 * ft.centred_sq ? procrustes_fit(t, library_->view(p, q), norm_).normalized
                                        : std::sqrt(d_sq / fc.centred_sq);
      }
    }
    rows_->data[slot] = std::move(out);
  });
  return rows_->data[slot];
}

double DistanceTable::distance(int q, int target, int comparison) const {
  if (!library_->contains(comparison))
    throw DataError("period " + std::to_string(comparison) + " outside embedding library");
  return row(q, target)[static_cast<std::size_t>(comparison - library_->first_period())];
}

// ------------------------------------------------------------- likelihood

double gaussian_log_likelihood(const ResidualSummary& r, double sigma2) {
  if (!(sigma2 > 0.0)) return kNegInf;
  const double n = static_cast<double>(r.n_obs);
  return -0.5 * n * std::log(2.0 * std::numbers::pi * sigma2) - 0.5 * r.sum_sq / sigma2;
}

double log_posterior(const ModelState& s, const ResidualSummary& r, const PriorConfig& p) {
  if (!in_support(s, p)) return kNegInf;
  return gaussian_log_likelihood(r, s.sigma2) +
         inverse_gamma_log_density(s.theta1, p.theta1_shape, p.theta1_rate) +
         inverse_gamma_log_density(s.sigma2, p.sigma2_shape, p.sigma2_rate);
}

AnalogModel::AnalogModel(std::shared_ptr<const DistanceTable> forcing_distances,
                         Eigen::MatrixXd responses, TrainingIndex index,
                         std::shared_ptr<const DistanceTable> response_distances)
    : forcing_(std::move(forcing_distances)),
      response_(std::move(response_distances)),
      responses_(std::move(responses)),
      index_(std::move(index)) {
  if (!forcing_) throw ConfigError("analog model needs a forcing distance table");
  if (index_.training_periods.empty()) throw ConfigError("analog model has no training periods");
  if (responses_.cols() < index_.t_end)
    throw DataError("responses end at period " + std::to_string(responses_.cols()) +
                    " before training end " + std::to_string(index_.t_end));
  if (!responses_.allFinite()) throw DataError("responses contain non-finite values");
  const auto& lib = forcing_->library();
  if (index_.q_max > lib.depth() || index_.first_candidate() < lib.first_period())
    throw ConfigError("training index does not fit the forcing library");
  if (response_) {
    const auto& rlib = response_->library();
    if (rlib.depth() < index_.q_max || index_.first_candidate() < rlib.first_period())
      throw ConfigError("response embedding library does not cover the training index");
  }
  sorted_.resize(static_cast<std::size_t>(lib.depth()) + 1);
}

DistanceKind AnalogModel::distance_kind() const {
  return response_ ? DistanceKind::kCombined : forcing_->kind();
}

std::vector<Candidate> AnalogModel::distances(const ModelState& state, int period,
                                              std::span<const int> candidates) const {
  const auto forcing_row = forcing_->row(state.q, period);
  const int first = forcing_->library().first_period();
  std::span<const double> response_row;
  int response_first = 0;
  if (response_) {
    response_row = response_->row(state.q, period);
    response_first = response_->library().first_period();
  }
  std::vector<Candidate> out;
  out.reserve(candidates.size());
  for (int l : candidates) {
    if (!forcing_->library().contains(l))
      throw DataError("analog period " + std::to_string(l) + " outside embedding library");
    double d = forcing_row[static_cast<std::size_t>(l - first)];
    if (response_) {
      if (!response_->library().contains(l))
        throw DataError("analog period " + std::to_string(l) + " outside response library");
      const double a = response_row[static_cast<std::size_t>(l - response_first)];
      d = (std::isfinite(d) && std::isfinite(a)) ? combined_distance(d, a, state.gamma)
                                                 : std::numeric_limits<double>::infinity();
    }
    out.push_back({l, d});
  }
  return out;
}

WeightVector AnalogModel::weights(const ModelState& state, int period,
                                  std::span<const int> candidates) const {
  const auto d = distances(state, period, candidates);
  return kernel_weights(d, state.theta1, state.m);
}

namespace {

Eigen::VectorXd weighted_response(const WeightVector& w, const Eigen::MatrixXd& responses, int lead) {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(responses.rows());
  for (std::size_t i = 0; i < w.support.size(); ++i) {
    const int col = w.support[i] + lead - 1;
    if (col < 0 || col >= responses.cols())
      throw DataError("analog response at period " + std::to_string(col + 1) + " is unavailable");
    mean += w.weights[i] * responses.col(col);
  }
  return mean;
}

}  // namespace

Eigen::VectorXd AnalogModel::analog_mean(const ModelState& state, int period,
                                         std::span<const int> candidates) const {
  for (int l : candidates)
    if (l + index_.lead > responses_.cols() || l + index_.lead < 1)
      throw DataError("analog response at period " + std::to_string(l + index_.lead) +
                      " is unavailable");
  return weighted_response(weights(state, period, candidates), responses_, index_.lead);
}

const std::vector<Candidate>& AnalogModel::sorted_training(int q, std::size_t slot) {
  auto& per_q = sorted_[static_cast<std::size_t>(q)];
  if (per_q.empty()) per_q.resize(index_.training_periods.size());
  auto& cached = per_q[slot];
  if (cached.empty()) {
    const int t = index_.training_periods[slot];
    const auto cands = index_.candidates(t);
    cached = distances(ModelState{1.0, 1, q, 1.0, 1.0}, t, cands);
    for (auto& c : cached)
      if (std::isnan(c.distance)) c.distance = std::numeric_limits<double>::infinity();
    std::sort(cached.begin(), cached.end(), nearer);
  }
  return cached;
}

ResidualSummary AnalogModel::residuals(const ModelState& state) {
  if (state.q < 1 || state.q > index_.q_max)
    throw ConfigError("embedding depth " + std::to_string(state.q) + " outside [1, q_max " +
                      std::to_string(index_.q_max) + "]");
  ResidualSummary out;
  const bool combined = response_ != nullptr;
  for (std::size_t slot = 0; slot < index_.training_periods.size(); ++slot) {
    const int t = index_.training_periods[slot];
    WeightVector w;
    if (combined) {
      const auto cands = index_.candidates(t);
      w = kernel_weights(distances(state, t, cands), state.theta1, state.m);
    } else {
      w = kernel_weights_sorted(sorted_training(state.q, slot), state.theta1, state.m);
    }
    const Eigen::VectorXd mean = weighted_response(w, responses_, index_.lead);
    out.sum_sq += (responses_.col(t + index_.lead - 1) - mean).squaredNorm();
    out.n_obs += static_cast<std::size_t>(responses_.rows());
  }
  if (!std::isfinite(out.sum_sq))
    throw NumericError("non-finite training residuals at theta1=" + text::format_double(state.theta1) +
                       " m=" + std::to_string(state.m) + " q=" + std::to_string(state.q));
  return out;
}

double AnalogModel::log_likelihood(const ModelState& state) {
  return gaussian_log_likelihood(residuals(state), state.sigma2);
}

// ---------------------------------------------------------------- sampler

void SamplerConfig::validate() const {
  if (iterations < 1) throw ConfigError("iterations must be positive");
  if (burn_in < 0 || burn_in >= iterations) throw ConfigError("need 0 <= burn_in < iterations");
  if (!(theta1_log_step >= 0.0)) throw ConfigError("theta1 proposal step must be >= 0");
  if (!(gamma_step >= 0.0) || gamma_step > 1.0) throw ConfigError("gamma step must lie in [0, 1]");
}

Sampler::Sampler(ResidualModel& model, PriorConfig priors, SamplerConfig config)
    : model_(model), priors_(priors), config_(config) {
  priors_.validate();
  config_.validate();
}

void Sampler::reset(const ModelState& state) {
  if (!in_support(state, priors_)) throw ConfigError("initial state outside prior support");
  state_ = state;
  current_ = model_.residuals(state_);
}

double Sampler::log_posterior() const { return analogcast::log_posterior(state_, current_, priors_); }

void Sampler::update_sigma2(Rng& rng) {
  const double shape = priors_.sigma2_shape + 0.5 * static_cast<double>(current_.n_obs);
  const double rate = priors_.sigma2_rate + 0.5 * current_.sum_sq;
  state_.sigma2 = rng.inverse_gamma(shape, rate);
}

bool Sampler::metropolis(const ModelState& proposal, double log_hastings, Rng& rng,
                         AcceptanceCount& count) {
  ++count.proposed;
  if (proposal == state_) {
    ++count.accepted;
    return true;
  }
  if (!in_support(proposal, priors_)) return false;
  const ResidualSummary r = model_.residuals(proposal);
  const double lp_new = analogcast::log_posterior(proposal, r, priors_);
  const double lp_old = log_posterior();
  if (std::isnan(lp_new))
    throw NumericError("log posterior is NaN at theta1=" + text::format_double(proposal.theta1) +
                       " m=" + std::to_string(proposal.m) + " q=" + std::to_string(proposal.q));
  if (std::log(rng.uniform()) < lp_new - lp_old + log_hastings) {
    state_ = proposal;
    current_ = r;
    ++count.accepted;
    return true;
  }
  return false;
}

bool Sampler::update_theta1(Rng& rng) {
  ModelState proposal = state_;
  const double step = config_.theta1_log_step * rng.normal();
  proposal.theta1 = state_.theta1 * std::exp(step);
  // Random walk on log(theta1): the Jacobian contributes theta1' / theta1.
  return metropolis(proposal, step, rng, theta1_acceptance);
}

namespace {

int reflect(int v, int lo, int hi) {
  if (v < lo) return 2 * lo - v;
  if (v > hi) return 2 * hi - v;
  return v;
}

double walk_probability(int from, int to, int lo, int hi) {
  double p = 0.0;
  if (reflect(from + 1, lo, hi) == to) p += 0.5;
  if (reflect(from - 1, lo, hi) == to) p += 0.5;
  return p;
}

}  // namespace

int Sampler::propose_int(int value, int lo, int hi, Rng& rng, double& log_hastings) const {
  log_hastings = 0.0;
  if (config_.int_proposal == IntProposal::kUniform) return rng.uniform_int(lo, hi);
  const int proposal = reflect(value + (rng.uniform() < 0.5 ? -1 : 1), lo, hi);
  log_hastings = std::log(walk_probability(proposal, value, lo, hi)) -
                 std::log(walk_probability(value, proposal, lo, hi));
  return proposal;
}

bool Sampler::update_m(Rng& rng) {
  if (priors_.m_min == priors_.m_max) return false;
  ModelState proposal = state_;
  double log_hastings = 0.0;
  proposal.m = propose_int(state_.m, priors_.m_min, priors_.m_max, rng, log_hastings);
  return metropolis(proposal, log_hastings, rng, m_acceptance);
}

bool Sampler::update_q(Rng& rng) {
  if (priors_.q_min == priors_.q_max) return false;
  ModelState proposal = state_;
  double log_hastings = 0.0;
  proposal.q = propose_int(state_.q, priors_.q_min, priors_.q_max, rng, log_hastings);
  return metropolis(proposal, log_hastings, rng, q_acceptance);
}

bool Sampler::update_gamma(Rng& rng) {
  if (!priors_.sample_gamma) return false;
  ModelState proposal = state_;
  double g = state_.gamma + config_.gamma_step * (2.0 * rng.uniform() - 1.0);
  if (g < 0.0) g = -g;
  if (g > 1.0) g = 2.0 - g;
  proposal.gamma = g;
  return metropolis(proposal, 0.0, rng, gamma_acceptance);
}

StepDiagnostics Sampler::step(Rng& rng) {
  StepDiagnostics d;
  update_sigma2(rng);
  d.theta1_accepted = update_theta1(rng);
  d.m_accepted = update_m(rng);
  d.q_accepted = update_q(rng);
  d.gamma_accepted = update_gamma(rng);
  d.log_posterior = log_posterior();
  return d;
}

StepResult mwg_step(ResidualModel& model, const ModelState& state, Rng& rng,
                    const PriorConfig& priors, const SamplerConfig& config) {
  Sampler sampler(model, priors, config);
  sampler.reset(state);
  const auto d = sampler.step(rng);
  return {sampler.state(), d};
}

std::span<const ModelState> Chain::retained() const {
  const auto skip = std::min(static_cast<std::size_t>(std::max(burn_in, 0)), states.size());
  return std::span<const ModelState>(states).subspan(skip);
}

ModelState search_initial_state(ResidualModel& model, const PriorConfig& priors) {
  priors.validate();
  const ModelState base = initial_state(priors);
  ModelState best = base;
  double best_ss = std::numeric_limits<double>::infinity();
  std::size_t n_obs = 0;
  for (int q = priors.q_min; q <= priors.q_max; ++q)
    for (int m = priors.m_min; m <= priors.m_max; ++m)
      for (double factor : {0.03, 0.1, 0.3, 1.0, 3.0, 10.0}) {
        ModelState s = base;
        s.q = q;
        s.m = m;
        s.theta1 = base.theta1 * factor;
        const ResidualSummary r = model.residuals(s);
        if (std::isfinite(r.sum_sq) && r.sum_sq < best_ss) {
          best_ss = r.sum_sq;
          best = s;
          n_obs = r.n_obs;
        }
      }
  if (!std::isfinite(best_ss)) throw NumericError("no initial state with a finite residual sum");
  if (n_obs > 0 && best_ss > 0.0) best.sigma2 = best_ss / static_cast<double>(n_obs);
  return best;
}

Chain run_chain(ResidualModel& model, const PriorConfig& priors, const SamplerConfig& config,
                std::optional<ModelState> initial) {
  Sampler sampler(model, priors, config);
  sampler.reset(initial.value_or(initial_state(priors)));
  Rng rng(config.seed);
  Chain chain;
  chain.burn_in = config.burn_in;
  chain.seed = config.seed;
  chain.states.reserve(static_cast<std::size_t>(config.iterations));
  chain.log_posterior.reserve(static_cast<std::size_t>(config.iterations));
  for (int it = 0; it < config.iterations; ++it) {
    const auto d = sampler.step(rng);
    if (!std::isfinite(d.log_posterior)) {
      const auto& s = sampler.state();
      throw NumericError("non-finite log posterior at iteration " + std::to_string(it + 1) +
                         " (theta1=" + text::format_double(s.theta1) + " m=" + std::to_string(s.m) +
                         " q=" + std::to_string(s.q) + " sigma2=" + text::format_double(s.sigma2) + ")");
    }
    chain.states.push_back(sampler.state());
    chain.log_posterior.push_back(d.log_posterior);
  }
  chain.theta1_acceptance = sampler.theta1_acceptance;
  chain.m_acceptance = sampler.m_acceptance;
  chain.q_acceptance = sampler.q_acceptance;
  chain.gamma_acceptance = sampler.gamma_acceptance;
  return chain;
}

void save_chain(const std::filesystem::path& path, const Chain& chain) {
  auto out = text::open_output(path);
  out << "iter,theta1,m,q,sigma2,gamma,log_post\n";
  for (std::size_t i = 0; i < chain.states.size(); ++i) {
    const auto& s = chain.states[i];
    out << (i + 1) << ',' << text::format_double(s.theta1) << ',' << s.m << ',' << s.q << ','
        << text::format_double(s.sigma2) << ',' << text::format_double(s.gamma) << ','
        << text::format_double(chain.log_posterior[i]) << '\n';
  }
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

Chain load_chain(const std::filesystem::path& path, int burn_in) {
  auto in = text::open_input(path);
  std::string line;
  if (!std::getline(in, line) ||
      text::split(line) != std::vector<std::string>{"iter", "theta1", "m", "q", "sigma2", "gamma", "log_post"})
    throw DataError(path.string() + ":1: expected chain header iter,theta1,m,q,sigma2,gamma,log_post");
  Chain chain;
  chain.burn_in = burn_in;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto cells = text::split(line);
    const auto bad = [&] {
      return DataError(path.string() + ":" + std::to_string(line_no) + ": malformed chain row");
    };
    if (cells.size() != 7) throw bad();
    ModelState s;
    long long m = 0, q = 0;
    double lp = 0.0;
    if (!text::parse_double(cells[1], s.theta1) || !text::parse_int(cells[2], m) ||
        !text::parse_int(cells[3], q) || !text::parse_double(cells[4], s.sigma2) ||
        !text::parse_double(cells[5], s.gamma) || !text::parse_double(cells[6], lp))
      throw bad();
    s.m = static_cast<int>(m);
    s.q = static_cast<int>(q);
    chain.states.push_back(s);
    chain.log_posterior.push_back(lp);
  }
  if (static_cast<std::size_t>(burn_in) >= chain.states.size())
    throw DataError(path.string() + ": chain has no post-burn-in states");
  return chain;
}

// -------------------------------------------------------------- forecasts

Eigen::VectorXd row_quantile(const Eigen::MatrixXd& draws, double prob) {
  Eigen::VectorXd out(draws.rows());
  std::vector<double> row(static_cast<std::size_t>(draws.cols()));
  for (Eigen::Index i = 0; i < draws.rows(); ++i) {
    for (Eigen::Index j = 0; j < draws.cols(); ++j) row[static_cast<std::size_t>(j)] = draws(i, j);
    std::sort(row.begin(), row.end());
    const double h = (static_cast<double>(row.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, row.size() - 1);
    out(i) = row[lo] + (h - static_cast<double>(lo)) * (row[hi] - row[lo]);
  }
  return out;
}

ForecastDistribution posterior_predict(const Chain& chain, const AnalogModel& model,
                                       int initial_period, const BasisSet& response_basis,
                                       const PredictOptions& options) {
  if (options.thin < 1) throw ConfigError("thinning interval must be >= 1");
  const auto retained = chain.retained();
  std::vector<ModelState> states;
  for (std::size_t i = 0; i < retained.size(); i += static_cast<std::size_t>(options.thin))
    states.push_back(retained[i]);
  if (states.empty()) throw ConfigError("chain has no retained states");
  if (response_basis.size() != model.responses().rows())
    throw DataError("response basis has " + std::to_string(response_basis.size()) +
                    " columns but the model has " + std::to_string(model.responses().rows()) +
                    " response coefficients");
  const auto& index = model.index();
  if (!model.library().contains(initial_period))
    throw DataError("forecast initial period " + std::to_string(initial_period) +
                    " cannot be embedded (library covers [" +
                    std::to_string(model.library().first_period()) + ", " +
                    std::to_string(model.library().last_period()) + "])");
  const int known = options.last_known_response > 0 ? options.last_known_response : index.t_end;
  const auto candidates = forecast_candidates(model.library(), initial_period, known, index.lead, index.q_max);

  const auto n_draws = options.n_draws > 0 ? static_cast<std::size_t>(options.n_draws) : states.size();
  std::vector<Eigen::VectorXd> means(states.size());
  Rng rng(options.seed);
  ForecastDistribution f;
  f.initial_period = initial_period;
  f.target_period = initial_period + index.lead;
  f.coeff_draws.resize(model.responses().rows(), static_cast<Eigen::Index>(n_draws));
  for (std::size_t i = 0; i < n_draws; ++i) {
    const std::size_t k = i % states.size();
    if (means[k].size() == 0) means[k] = model.analog_mean(states[k], initial_period, candidates);
    const double sd = std::sqrt(states[k].sigma2);
    for (Eigen::Index r = 0; r < f.coeff_draws.rows(); ++r)
      f.coeff_draws(r, static_cast<Eigen::Index>(i)) = means[k](r) + sd * rng.normal();
  }
  f.field_draws = response_basis.matrix() * f.coeff_draws;
  f.coeff_mean = f.coeff_draws.rowwise().mean();
  f.coeff_lower = row_quantile(f.coeff_draws, 0.025);
  f.coeff_upper = row_quantile(f.coeff_draws, 0.975);
  f.field_mean = response_basis.matrix() * f.coeff_mean;
  f.field_lower = row_quantile(f.field_draws, 0.025);
  f.field_upper = row_quantile(f.field_draws, 0.975);
  return f;
}

}  // namespace analogcast
