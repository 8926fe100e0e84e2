#include "analogcast/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

#include "analogcast/baselines.hpp"
#include "analogcast/basis.hpp"
#include "analogcast/bayes.hpp"
#include "analogcast/embedding.hpp"
#include "analogcast/error.hpp"
#include "analogcast/field.hpp"
#include "analogcast/rng.hpp"
#include "analogcast/synthetic.hpp"
#include "text.hpp"

namespace analogcast {

namespace fs = std::filesystem;

namespace {

// ------------------------------------------------------------ inputs

fs::path input_path(const RunConfig& c, const std::string& value, const char* fallback) {
  return value.empty() ? fs::path(c.out_dir) / fallback : fs::path(value);
}

void require_file(const fs::path& path, const char* key) {
  if (!fs::exists(path))
    throw ConfigError("config key '" + std::string(key) + "': file '" + path.string() + "' does not exist");
}

struct Inputs {
  FieldSeries forcing;
  FieldSeries response;
  std::optional<FieldSeries> auxiliary;
  RegionPartition partition;
  int n_time = 0;
  int t_start = 0;
  int t_end = 0;
  std::vector<int> targets;  // hold-out target periods
};

FieldSeries with_anomalies(const RunConfig& c, const FieldSeries& f, int t_end) {
  if (c.anomaly_period == 0) return f;
  const int lo = c.clim_start > 0 ? c.clim_start : f.times().front().index;
  const int hi = c.clim_end > 0 ? c.clim_end : f.times()[static_cast<std::size_t>(t_end - 1)].index;
  return to_anomalies(f, lo, hi, c.anomaly_period);
}

Inputs load_inputs(const RunConfig& c) {
  c.validate();
  const auto forcing_path = input_path(c, c.forcing, "forcing.csv");
  const auto response_path = input_path(c, c.response, "response.csv");
  require_file(forcing_path, "forcing");
  require_file(response_path, "response");
  std::optional<fs::path> aux_path;
  if (!c.auxiliary.empty()) {
    require_file(c.auxiliary, "auxiliary");
    aux_path = c.auxiliary;
  } else if (fs::exists(fs::path(c.out_dir) / "auxiliary.csv")) {
    aux_path = fs::path(c.out_dir) / "auxiliary.csv";
  }
  std::optional<fs::path> regions_path;
  if (!c.regions.empty()) {
    require_file(c.regions, "regions");
    regions_path = c.regions;
  } else if (fs::exists(fs::path(c.out_dir) / "regions.csv")) {
    regions_path = fs::path(c.out_dir) / "regions.csv";
  }

  const auto layout = parse_layout(c.layout);
  Inputs in;
  in.forcing = load_field(forcing_path, layout);
  in.response = load_field(response_path, layout);
  if (in.forcing.times() != in.response.times())
    throw DataError("'" + forcing_path.string() + "' and '" + response_path.string() +
                    "' have different time axes");
  if (!in.forcing.contiguous())
    throw DataError("'" + forcing_path.string() + "' has gaps in its time axis");
  in.n_time = static_cast<int>(in.forcing.n_time());
  in.t_end = c.train_end > 0 ? c.train_end : in.n_time - c.holdout;
  if (in.t_end < 1 || in.t_end + c.holdout > in.n_time)
    throw ConfigError("config key 'train_end': training end " + std::to_string(in.t_end) + " plus holdout " +
                      std::to_string(c.holdout) + " exceeds the " + std::to_string(in.n_time) + " periods");
  in.t_start = c.train_start > 0 ? c.train_start : c.lag * (c.priors.q_max - 1) + 1;
  for (int k = 1; k <= c.holdout; ++k) in.targets.push_back(in.t_end + k);
  for (int lead : c.leads)
    if (in.t_end + 1 - lead < c.lag * (c.priors.q_max - 1) + 1)
      throw ConfigError("config key 'leads': lead " + std::to_string(lead) +
                        " puts the first hold-out initial period before the first embeddable period");

  in.forcing = with_anomalies(c, in.forcing, in.t_end);
  in.response = with_anomalies(c, in.response, in.t_end);
  if (aux_path) {
    auto aux = load_field(*aux_path, layout);
    if (aux.times() != in.response.times() || aux.coords() != in.response.coords())
      throw DataError("'" + aux_path->string() + "' does not match the response locations and times");
    in.auxiliary = with_anomalies(c, aux, in.t_end);
  }
  in.partition = regions_path ? load_regions(*regions_path, in.response)
                              : RegionPartition(std::vector<int>(static_cast<std::size_t>(in.response.n_loc()), 1));
  return in;
}

// ------------------------------------------------------------- jobs

std::string job_name(const std::string& model, int region, int lead) {
  return model + "_r" + std::to_string(region) + "_lead" + std::to_string(lead);
}

std::string job_context(const std::string& model, int region, int lead) {
  return "region " + std::to_string(region) + ", " + model + ", lead " + std::to_string(lead);
}

int worker_count(const RunConfig& c, std::size_t jobs) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int want = c.jobs > 0 ? c.jobs : static_cast<int>(hw);
  return std::max(1, std::min(want, static_cast<int>(jobs)));
}

/// Runs fn(0..n-1) on `workers` threads. The error of the lowest-numbered
/// failing job is rethrown with its context prefix.
void run_jobs(int workers, std::size_t n, const std::function<void(std::size_t)>& fn,
              const std::function<std::string(std::size_t)>& context) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      throw Error(e.kind(), context(i) + ": " + e.what());
    } catch (const std::exception& e) {
      throw NumericError(context(i) + ": " + e.what());
    }
  }
}

// ------------------------------------------------------------ models

std::uint64_t variant_tag(const std::string& variant) {
  return static_cast<std::uint64_t>(variant.back() - '0');
}

struct RegionData {
  FieldSeries response;  // region rows
  std::optional<Eigen::MatrixXd> auxiliary;
};

struct Bases {
  std::shared_ptr<const BasisSet> forcing;
  std::shared_ptr<const BasisSet> response;
  std::string forcing_key;  // equal keys share forcing coefficients
};

/// Every quantity a chain, forecast or baseline needs for one job.
class Workspace {
 public:
  Workspace(const RunConfig& c, Inputs in) : c_(c), in_(std::move(in)) {
    for (int r = 1; r <= in_.partition.region_count(); ++r) {
      RegionData& d = regions_.emplace_back();
      d.response = restrict_to_region(in_.response, in_.partition, r);
      if (in_.auxiliary) d.auxiliary = restrict_to_region(*in_.auxiliary, in_.partition, r).values();
    }
  }

  const RunConfig& config() const { return c_; }
  const Inputs& inputs() const { return in_; }
  int region_count() const { return in_.partition.region_count(); }
  const RegionData& region(int r) const { return regions_[static_cast<std::size_t>(r - 1)]; }

  Bases bases(const std::string& variant, int region, int lead) {
    std::lock_guard lock(mutex_);
    const auto key = job_name(variant, region, lead);
    if (auto it = bases_.find(key); it != bases_.end()) return it->second;
    const int t_end = in_.t_end;
    const FieldSeries forcing_train = in_.forcing.select_columns(0, t_end);
    const FieldSeries response_train = this->region(region).response.select_columns(0, t_end);
    Bases b;
    if (variant == "BA1" || variant == "BA4") {
      if (!eof_forcing_) eof_forcing_ = std::make_shared<const BasisSet>(compute_eof(forcing_train, c_.p_beta));
      b.forcing = eof_forcing_;
      b.response = std::make_shared<const BasisSet>(compute_eof(response_train, c_.p_alpha));
      b.forcing_key = "EOF";
    } else if (variant == "BA2") {
      const auto meof = compute_meof(forcing_train, response_train, c_.p_joint);
      b.forcing = std::make_shared<const BasisSet>(meof.block("forcing"));
      b.response = std::make_shared<const BasisSet>(meof.block("response"));
      b.forcing_key = "MEOF_r" + std::to_string(region);
    } else {
      auto cca = compute_cca(forcing_train, response_train, lead, c_.cca_pre, c_.p_joint);
      b.forcing = std::make_shared<const BasisSet>(std::move(cca.forcing));
      b.response = std::make_shared<const BasisSet>(std::move(cca.response));
      b.forcing_key = key;
    }
    bases_.emplace(key, b);
    return b;
  }

  std::shared_ptr<const DistanceTable> forcing_table(const Bases& b) {
    std::lock_guard lock(mutex_);
    if (auto it = tables_.find(b.forcing_key); it != tables_.end()) return it->second;
    const auto coeffs = project(in_.forcing, b.forcing);
    auto lib = std::make_shared<const EmbeddingLibrary>(build_library(coeffs, c_.lag, c_.priors.q_max));
    auto table = std::make_shared<const DistanceTable>(lib, forcing_kind(), c_.scale_norm);
    tables_.emplace(b.forcing_key, table);
    return table;
  }

  std::shared_ptr<const DistanceTable> response_table(const std::string& variant, int region, int lead,
                                                      const Eigen::MatrixXd& alpha) {
    std::lock_guard lock(mutex_);
    const auto key = "response_" + job_name(variant, region, lead);
    if (auto it = tables_.find(key); it != tables_.end()) return it->second;
    auto lib = std::make_shared<const EmbeddingLibrary>(alpha, c_.lag, c_.priors.q_max);
    auto table = std::make_shared<const DistanceTable>(lib, forcing_kind(), c_.scale_norm);
    tables_.emplace(key, table);
    return table;
  }

  DistanceKind forcing_kind() const {
    return c_.distance == DistanceKind::kCombined ? DistanceKind::kProcrustes : c_.distance;
  }

  Eigen::MatrixXd response_coeffs(const Bases& b, int region) const {
    return project(this->region(region).response, b.response).coeffs;
  }

  /// A fresh model (models hold per-chain caches).
  std::unique_ptr<AnalogModel> model(const std::string& variant, int region, int lead) {
    const auto b = bases(variant, region, lead);
    const auto forcing = forcing_table(b);
    Eigen::MatrixXd alpha = response_coeffs(b, region);
    const auto index = build_training_index(forcing->library(), in_.t_start, in_.t_end, lead,
                                            c_.priors.q_max, c_.exclusion_radius);
    std::shared_ptr<const DistanceTable> response;
    if (variant == "BA4") response = response_table(variant, region, lead, alpha);
    return std::make_unique<AnalogModel>(forcing, std::move(alpha), index, response);
  }

  PriorConfig priors(const std::string& variant) const {
    PriorConfig p = c_.priors;
    p.sample_gamma = variant == "BA4";
    return p;
  }

  SamplerConfig sampler(const std::string& variant, int region, int lead) const {
    SamplerConfig s;
    s.iterations = c_.iterations;
    s.burn_in = c_.burn_in;
    s.seed = derive_seed(c_.seed, {variant_tag(variant), static_cast<std::uint64_t>(region),
                                   static_cast<std::uint64_t>(lead)});
    s.theta1_log_step = c_.theta1_step;
    s.gamma_step = c_.gamma_step;
    s.int_proposal = c_.int_proposal;
    return s;
  }

 private:
  const RunConfig& c_;
  Inputs in_;
  std::vector<RegionData> regions_;
  std::mutex mutex_;
  std::shared_ptr<const BasisSet> eof_forcing_;
  std::map<std::string, Bases> bases_;
  std::map<std::string, std::shared_ptr<const DistanceTable>> tables_;
};

struct Job {
  std::string model;
  int region;
  int lead;
};

std::vector<Job> variant_jobs(const RunConfig& c, int regions) {
  std::vector<Job> jobs;
  for (const auto& v : c.variants)
    for (int r = 1; r <= regions; ++r)
      for (int lead : c.leads) jobs.push_back({v, r, lead});
  return jobs;
}

fs::path chain_path(const RunConfig& c, const Job& j) {
  return fs::path(c.out_dir) / "chains" / (job_name(j.model, j.region, j.lead) + ".csv");
}

fs::path forecast_path(const RunConfig& c, const std::string& model, int region, int lead, const char* what) {
  return fs::path(c.out_dir) / "forecasts" / (job_name(model, region, lead) + "_" + what + ".csv");
}

std::vector<TimeStamp> target_times(const Inputs& in) {
  std::vector<TimeStamp> out;
  for (int t : in.targets) out.push_back(in.response.times()[static_cast<std::size_t>(t - 1)]);
  return out;
}

std::vector<int> initial_periods(const Inputs& in, int lead) {
  std::vector<int> out;
  for (int t : in.targets) out.push_back(t - lead);
  return out;
}

void log_line(std::ostream& log, std::mutex& m, const std::string& line) {
  std::lock_guard lock(m);
  log << line << '\n';
  log.flush();
}

std::string rate(const AcceptanceCount& a) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", a.rate());
  return buf;
}

void train_jobs(Workspace& ws, std::ostream& log) {
  const auto& c = ws.config();
  const auto jobs = variant_jobs(c, ws.region_count());
  std::mutex log_mutex;
  const auto hash = config_hash(c);
  run_jobs(
      worker_count(c, jobs.size()), jobs.size(),
      [&](std::size_t i) {
        const auto& j = jobs[i];
        auto model = ws.model(j.model, j.region, j.lead);
        const auto priors = ws.priors(j.model);
        const auto chain = run_chain(*model, priors, ws.sampler(j.model, j.region, j.lead),
                                     search_initial_state(*model, priors));
        const auto path = chain_path(c, j);
        save_chain(path, chain);
        auto out = text::open_output(path.string() + ".hash");
        out << hash << '\n';
        std::string msg = "train " + job_context(j.model, j.region, j.lead) + ": " +
                          std::to_string(chain.states.size()) + " iterations, acceptance theta1 " +
                          rate(chain.theta1_acceptance) + " m " + rate(chain.m_acceptance) + " q " +
                          rate(chain.q_acceptance);
        if (j.model == "BA4") msg += " gamma " + rate(chain.gamma_acceptance);
        log_line(log, log_mutex, msg);
      },
      [&](std::size_t i) { return job_context(jobs[i].model, jobs[i].region, jobs[i].lead); });
}

void write_draws(const fs::path& path, const ForecastDistribution& f, const std::vector<Coord>& coords) {
  auto out = text::open_output(path);
  out << "target,draw,lon,lat,value\n";
  for (Eigen::Index d = 0; d < f.field_draws.cols(); ++d)
    for (Eigen::Index i = 0; i < f.field_draws.rows(); ++i) {
      const auto& c = coords[static_cast<std::size_t>(i)];
      out << f.target_period << ',' << (d + 1) << ',' << text::format_double(c.lon) << ','
          << text::format_double(c.lat) << ',' << text::format_double(f.field_draws(i, d)) << '\n';
    }
}

void forecast_jobs(Workspace& ws, std::ostream& log) {
  const auto& c = ws.config();
  const auto& in = ws.inputs();
  const auto jobs = variant_jobs(c, ws.region_count());
  for (const auto& j : jobs) {
    const auto path = chain_path(c, j);
    if (!fs::exists(path))
      throw ConfigError("chain file '" + path.string() + "' does not exist (run train first)");
  }
  std::mutex log_mutex;
  const auto hash = config_hash(c);
  run_jobs(
      worker_count(c, jobs.size()), jobs.size(),
      [&](std::size_t i) {
        const auto& j = jobs[i];
        const auto path = chain_path(c, j);
        std::string stored;
        {
          std::ifstream h(path.string() + ".hash");
          h >> stored;
        }
        if (stored != hash)
          throw ConfigError("chain '" + path.string() + "' was trained under a different config (hash " +
                            (stored.empty() ? std::string("missing") : stored) + ", expected " + hash + ")");
        const auto chain = load_chain(path, c.burn_in);
        if (static_cast<int>(chain.states.size()) != c.iterations)
          throw DataError("chain '" + path.string() + "' has " + std::to_string(chain.states.size()) +
                          " rows, config expects " + std::to_string(c.iterations));
        const auto model = ws.model(j.model, j.region, j.lead);
        const auto bases = ws.bases(j.model, j.region, j.lead);
        const auto& region = ws.region(j.region).response;
        const auto n_loc = region.n_loc();
        const auto n = static_cast<Eigen::Index>(in.targets.size());
        Eigen::MatrixXd mean(n_loc, n), lower(n_loc, n), upper(n_loc, n);
        const auto starts = initial_periods(in, j.lead);
        for (Eigen::Index k = 0; k < n; ++k) {
          PredictOptions opt;
          opt.thin = c.thin;
          opt.seed = derive_seed(c.seed, {variant_tag(j.model), static_cast<std::uint64_t>(j.region),
                                          static_cast<std::uint64_t>(j.lead),
                                          static_cast<std::uint64_t>(1000 + starts[static_cast<std::size_t>(k)])});
          opt.last_known_response = in.t_end;
          const auto f = posterior_predict(chain, *model, starts[static_cast<std::size_t>(k)], *bases.response, opt);
          mean.col(k) = f.field_mean;
          lower.col(k) = f.field_lower;
          upper.col(k) = f.field_upper;
          if (c.save_draws)
            write_draws(fs::path(c.out_dir) / "forecasts" /
                            (job_name(j.model, j.region, j.lead) + "_draws_t" + std::to_string(f.target_period) + ".csv"),
                        f, region.coords());
        }
        const auto times = target_times(in);
        save_field(forecast_path(c, j.model, j.region, j.lead, "mean"), FieldSeries(mean, region.coords(), times));
        save_field(forecast_path(c, j.model, j.region, j.lead, "lower"), FieldSeries(lower, region.coords(), times));
        save_field(forecast_path(c, j.model, j.region, j.lead, "upper"), FieldSeries(upper, region.coords(), times));
        log_line(log, log_mutex, "forecast " + job_context(j.model, j.region, j.lead) + ": " +
                                     std::to_string(n) + " hold-out targets");
      },
      [&](std::size_t i) { return job_context(jobs[i].model, jobs[i].region, jobs[i].lead); });
}

void baseline_jobs(Workspace& ws, std::ostream& log) {
  const auto& c = ws.config();
  const auto& in = ws.inputs();
  std::vector<Job> jobs;
  for (const auto& b : c.baselines)
    for (int r = 1; r <= ws.region_count(); ++r)
      for (int lead : c.leads) jobs.push_back({b, r, lead});
  std::mutex log_mutex;
  run_jobs(
      worker_count(c, jobs.size()), jobs.size(),
      [&](std::size_t i) {
        const auto& j = jobs[i];
        const auto kind = parse_baseline_kind(j.model);
        // Linear baselines use the same coefficient spaces as BA1.
        const auto bases = ws.bases("BA1", j.region, j.lead);
        const auto& region = ws.region(j.region);
        BaselineData data;
        data.forcing = project(in.forcing, bases.forcing).coeffs;
        data.responses = ws.response_coeffs(bases, j.region);
        data.response_basis = bases.response;
        data.response_field = region.response.values();
        data.auxiliary = region.auxiliary;
        BaselineWindow window{1, in.t_end, j.lead, c.persistence_lag};
        const auto starts = initial_periods(in, j.lead);
        const auto f = run_baseline(kind, data, window, starts);
        save_field(forecast_path(c, j.model, j.region, j.lead, "mean"),
                   FieldSeries(f.field, region.response.coords(), target_times(in)));
        for (const auto& flag : f.flags)
          log_line(log, log_mutex, "baseline " + job_context(j.model, j.region, j.lead) + ": " + flag);
      },
      [&](std::size_t i) { return job_context(jobs[i].model, jobs[i].region, jobs[i].lead); });
}

Eigen::MatrixXd read_forecast(const fs::path& path, const FieldSeries& actual) {
  if (!fs::exists(path)) throw ConfigError("forecast file '" + path.string() + "' does not exist");
  const auto f = load_field(path, CsvLayout::kWide);
  if (f.coords() != actual.coords() || f.times() != actual.times())
    throw DataError("'" + path.string() + "' is not aligned with the hold-out window and region locations");
  return f.values();
}

void write_timeseries(const fs::path& path, const FieldSeries& actual, const Eigen::MatrixXd& mean,
                      const Eigen::MatrixXd& lower, const Eigen::MatrixXd& upper) {
  auto out = text::open_output(path);
  out << "target,lon,lat,realized,mean,lower,upper\n";
  for (Eigen::Index k = 0; k < actual.n_time(); ++k)
    for (Eigen::Index i = 0; i < actual.n_loc(); ++i) {
      const auto& c = actual.coords()[static_cast<std::size_t>(i)];
      out << actual.times()[static_cast<std::size_t>(k)].label << ',' << text::format_double(c.lon) << ','
          << text::format_double(c.lat) << ',' << text::format_double(actual.values()(i, k)) << ','
          << text::format_double(mean(i, k)) << ',' << text::format_double(lower(i, k)) << ','
          << text::format_double(upper(i, k)) << '\n';
    }
}

ScoreCard score(Workspace& ws, std::ostream& log) {
  const auto& c = ws.config();
  const auto& in = ws.inputs();
  std::vector<std::string> models = c.variants;
  models.insert(models.end(), c.baselines.begin(), c.baselines.end());
  std::vector<ModelForecasts> forecasts;
  for (int r = 1; r <= ws.region_count(); ++r) {
    const auto& region = ws.region(r).response;
    const auto actual = region.select_columns(in.t_end, static_cast<Eigen::Index>(in.targets.size()));
    for (int lead : c.leads) {
      for (const auto& m : models) {
        ModelForecasts f;
        f.region = r;
        f.model = m;
        f.lead = lead;
        f.actuals = actual.values();
        f.predictions = read_forecast(forecast_path(c, m, r, lead, "mean"), actual);
        if (std::find(c.variants.begin(), c.variants.end(), m) != c.variants.end())
          write_timeseries(fs::path(c.out_dir) / "timeseries" / (job_name(m, r, lead) + ".csv"), actual,
                           f.predictions, read_forecast(forecast_path(c, m, r, lead, "lower"), actual),
                           read_forecast(forecast_path(c, m, r, lead, "upper"), actual));
        forecasts.push_back(std::move(f));
      }
    }
  }
  const auto card = scorecard(forecasts, models, c.ac_form);
  save_scorecard(fs::path(c.out_dir) / "scorecard.csv", card);
  log << "scorecard: " << card.rows.size() << " rows -> " << (fs::path(c.out_dir) / "scorecard.csv").string()
      << '\n';
  return card;
}

void write_tables(const RunConfig& c, const ScoreCard& card, int regions, std::ostream& log) {
  std::vector<std::string> models = c.variants;
  models.insert(models.end(), c.baselines.begin(), c.baselines.end());
  for (int lead : c.leads) {
    for (const bool is_mse : {true, false}) {
      const auto path = fs::path(c.out_dir) / "tables" /
                        ((is_mse ? "mse_lead" : "ac_lead") + std::to_string(lead) + ".csv");
      auto out = text::open_output(path);
      out << "region";
      for (const auto& m : models) out << ',' << m;
      out << ",best\n";
      for (int r = 1; r <= regions; ++r) {
        out << r;
        std::string best;
        for (const auto& m : models) {
          const auto& row = card.at(r, m, lead);
          out << ',' << text::format_double(is_mse ? row.mse : row.ac);
          if (is_mse ? row.best_mse : row.best_ac) best += (best.empty() ? "" : " ") + m;
        }
        out << ',' << best << '\n';
      }
    }
    log << "lead " << lead << " best-MSE counts:";
    for (const auto& m : models) {
      int wins = 0;
      for (int r = 1; r <= regions; ++r) wins += card.at(r, m, lead).best_mse ? 1 : 0;
      log << ' ' << m << '=' << wins;
    }
    log << '\n';
  }
}

}  // namespace

void cmd_synth(const RunConfig& config, std::ostream& log) {
  config.validate();
  const auto result = generate_synthetic(config.synth);
  const fs::path dir(config.out_dir);
  save_field(dir / "forcing.csv", result.forcing);
  save_field(dir / "response.csv", result.response);
  // Auxiliary: the response one period earlier (the first period repeats).
  Eigen::MatrixXd aux(result.response.n_loc(), result.response.n_time());
  aux.col(0) = result.response.values().col(0);
  aux.rightCols(aux.cols() - 1) = result.response.values().leftCols(aux.cols() - 1);
  save_field(dir / "auxiliary.csv", result.response.with_values(aux));
  const auto partition = banded_partition(result.response, config.synth_regions);
  save_regions(dir / "regions.csv", result.response, partition);
  log << "synth: " << result.forcing.n_loc() << " forcing and " << result.response.n_loc()
      << " response locations, " << result.forcing.n_time() << " periods, " << partition.region_count()
      << " regions -> " << dir.string() << '\n';
}

void cmd_basis(const RunConfig& config, std::ostream& log) {
  Workspace ws(config, load_inputs(config));
  for (const auto& j : variant_jobs(config, ws.region_count())) {
    try {
      const auto b = ws.bases(j.model, j.region, j.lead);
      const auto stem = fs::path(config.out_dir) / "basis" / job_name(j.model, j.region, j.lead);
      save_basis(stem.string() + "_forcing.csv", *b.forcing);
      save_basis(stem.string() + "_response.csv", *b.response);
      for (const auto& note : b.response->notes)
        log << "basis " << job_context(j.model, j.region, j.lead) << ": " << note << '\n';
    } catch (const Error& e) {
      throw Error(e.kind(), job_context(j.model, j.region, j.lead) + ": " + e.what());
    }
  }
  log << "basis: wrote bases for " << ws.region_count() << " region(s)\n";
}

void cmd_train(const RunConfig& config, std::ostream& log) {
  Workspace ws(config, load_inputs(config));
  train_jobs(ws, log);
}

void cmd_forecast(const RunConfig& config, std::ostream& log) {
  Workspace ws(config, load_inputs(config));
  forecast_jobs(ws, log);
}

ScoreCard cmd_evaluate(const RunConfig& config, std::ostream& log) {
  Workspace ws(config, load_inputs(config));
  baseline_jobs(ws, log);
  return score(ws, log);
}

ScoreCard cmd_compare(const RunConfig& config, std::ostream& log) {
  Workspace ws(config, load_inputs(config));
  train_jobs(ws, log);
  forecast_jobs(ws, log);
  baseline_jobs(ws, log);
  const auto card = score(ws, log);
  write_tables(config, card, ws.region_count(), log);
  return card;
}

}  // namespace analogcast
