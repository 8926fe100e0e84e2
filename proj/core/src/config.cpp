#include "analogcast/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

#include "analogcast/baselines.hpp"
#include "analogcast/error.hpp"
#include "text.hpp"

namespace analogcast {

namespace {

struct Key {
  const char* name;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  throw ConfigError("config key '" + key + "': cannot parse '" + value + "' as " + expected);
}

int to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  if (!text::parse_int(v, out) || out < -2147483647LL || out > 2147483647LL) bad_value(key, v, "an integer");
  return static_cast<int>(out);
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  const auto t = text::trim(v);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) bad_value(key, v, "an unsigned integer");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  if (!text::parse_double(v, out) || !std::isfinite(out)) bad_value(key, v, "a finite number");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  const auto t = text::trim(v);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  bad_value(key, v, "a boolean");
}

std::vector<std::string> to_list(const std::string& v) {
  std::vector<std::string> out;
  for (const auto& item : text::split(v))
    if (!text::trim(item).empty()) out.emplace_back(text::trim(item));
  return out;
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::ostringstream os;
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
  return os.str();
}

#define KEY_STR(name, member) \
  Key{name, [](const RunConfig& c) { return c.member; }, [](RunConfig& c, const std::string& v) { c.member = std::string(text::trim(v)); }}
#define KEY_INT(name, member) \
  Key{name, [](const RunConfig& c) { return std::to_string(c.member); }, [](RunConfig& c, const std::string& v) { c.member = to_int(name, v); }}
#define KEY_DBL(name, member) \
  Key{name, [](const RunConfig& c) { return text::format_double(c.member); }, [](RunConfig& c, const std::string& v) { c.member = to_double(name, v); }}
#define KEY_U64(name, member) \
  Key{name, [](const RunConfig& c) { return std::to_string(c.member); }, [](RunConfig& c, const std::string& v) { c.member = to_u64(name, v); }}

const std::vector<Key>& keys() {
  static const std::vector<Key> table{
      KEY_STR("forcing", forcing),
      KEY_STR("response", response),
      KEY_STR("auxiliary", auxiliary),
      KEY_STR("regions", regions),
      KEY_STR("layout", layout),
      KEY_STR("out_dir", out_dir),
      KEY_INT("anomaly_period", anomaly_period),
      KEY_INT("clim_start", clim_start),
      KEY_INT("clim_end", clim_end),
      KEY_INT("synth_n_loc_forcing", synth.n_loc_forcing),
      KEY_INT("synth_n_loc_response", synth.n_loc_response),
      KEY_INT("synth_n_time", synth.n_time),
      KEY_INT("synth_coupling_lag", synth.coupling_lag),
      KEY_DBL("synth_nonlinearity", synth.nonlinearity),
      KEY_DBL("synth_noise_sd", synth.noise_sd),
      KEY_U64("synth_seed", synth.seed),
      KEY_INT("synth_latent_dim", synth.latent_dim),
      KEY_DBL("synth_persistence", synth.persistence),
      KEY_DBL("synth_cycle_length", synth.cycle_length),
      KEY_DBL("synth_phase_noise", synth.phase_noise),
      KEY_DBL("synth_amplitude_sd", synth.amplitude_sd),
      KEY_INT("synth_embedding_extent", synth.embedding_extent),
      KEY_INT("synth_regions", synth_regions),
      KEY_INT("p_alpha", p_alpha),
      KEY_INT("p_beta", p_beta),
      KEY_INT("p_joint", p_joint),
      KEY_INT("cca_pre", cca_pre),
      KEY_INT("lag", lag),
      Key{"leads", [](const RunConfig& c) { return join(c.leads); },
          [](RunConfig& c, const std::string& v) {
            c.leads.clear();
            for (const auto& s : to_list(v)) c.leads.push_back(to_int("leads", s));
          }},
      KEY_INT("train_start", train_start),
      KEY_INT("train_end", train_end),
      KEY_INT("holdout", holdout),
      KEY_INT("exclusion_radius", exclusion_radius),
      KEY_INT("m_min", priors.m_min),
      KEY_INT("m_max", priors.m_max),
      KEY_INT("q_min", priors.q_min),
      KEY_INT("q_max", priors.q_max),
      KEY_DBL("theta1_shape", priors.theta1_shape),
      KEY_DBL("theta1_rate", priors.theta1_rate),
      KEY_DBL("sigma2_shape", priors.sigma2_shape),
      KEY_DBL("sigma2_rate", priors.sigma2_rate),
      Key{"variants", [](const RunConfig& c) { return join(c.variants); },
          [](RunConfig& c, const std::string& v) { c.variants = to_list(v); }},
      Key{"distance", [](const RunConfig& c) { return std::string(to_string(c.distance)); },
          [](RunConfig& c, const std::string& v) {
            try {
              c.distance = parse_distance_kind(text::trim(v));
            } catch (const ConfigError& e) {
              throw ConfigError(std::string("config key 'distance': ") + e.what());
            }
          }},
      Key{"scale_norm",
          [](const RunConfig& c) { return std::string(c.scale_norm == ScaleNorm::kCentered ? "centered" : "uncentered"); },
          [](RunConfig& c, const std::string& v) {
            const auto t = text::trim(v);
            if (t == "centered") c.scale_norm = ScaleNorm::kCentered;
            else if (t == "uncentered") c.scale_norm = ScaleNorm::kUncentered;
            else bad_value("scale_norm", v, "centered | uncentered");
          }},
      KEY_INT("iterations", iterations),
      KEY_INT("burn_in", burn_in),
      KEY_DBL("theta1_step", theta1_step),
      KEY_DBL("gamma_step", gamma_step),
      Key{"int_proposal",
          [](const RunConfig& c) { return std::string(c.int_proposal == IntProposal::kRandomWalk ? "random_walk" : "uniform"); },
          [](RunConfig& c, const std::string& v) {
            const auto t = text::trim(v);
            if (t == "random_walk") c.int_proposal = IntProposal::kRandomWalk;
            else if (t == "uniform") c.int_proposal = IntProposal::kUniform;
            else bad_value("int_proposal", v, "random_walk | uniform");
          }},
      KEY_INT("thin", thin),
      Key{"save_draws", [](const RunConfig& c) { return std::string(c.save_draws ? "true" : "false"); },
          [](RunConfig& c, const std::string& v) { c.save_draws = to_bool("save_draws", v); }},
      Key{"baselines", [](const RunConfig& c) { return join(c.baselines); },
          [](RunConfig& c, const std::string& v) { c.baselines = to_list(v); }},
      KEY_INT("persistence_lag", persistence_lag),
      Key{"ac_form", [](const RunConfig& c) { return std::string(c.ac_form == AcForm::kCorrected ? "corrected" : "printed"); },
          [](RunConfig& c, const std::string& v) {
            const auto t = text::trim(v);
            if (t == "corrected") c.ac_form = AcForm::kCorrected;
            else if (t == "printed") c.ac_form = AcForm::kPrinted;
            else bad_value("ac_form", v, "corrected | printed");
          }},
      KEY_U64("seed", seed),
      KEY_INT("jobs", jobs),
  };
  return table;
}

#undef KEY_STR
#undef KEY_INT
#undef KEY_DBL
#undef KEY_U64

void require(bool ok, const char* key, const std::string& why) {
  if (!ok) throw ConfigError(std::string("config key '") + key + "': " + why);
}

}  // namespace

void RunConfig::validate() const {
  require(layout == "wide" || layout == "long", "layout", "must be wide or long");
  require(!out_dir.empty(), "out_dir", "must not be empty");
  require(anomaly_period >= 0 && (anomaly_period == 0 || 12 % anomaly_period == 0), "anomaly_period",
          "must be 0 or divide 12");
  require(synth_regions >= 1, "synth_regions", "must be >= 1");
  require(synth.n_loc_response >= synth_regions, "synth_n_loc_response", "needs at least one location per region");
  require(p_alpha >= 1, "p_alpha", "must be >= 1");
  require(p_beta >= 1, "p_beta", "must be >= 1");
  require(p_joint >= 1, "p_joint", "must be >= 1");
  require(cca_pre >= p_joint, "cca_pre", "must be >= p_joint");
  require(lag >= 1, "lag", "must be >= 1");
  require(!leads.empty(), "leads", "needs at least one lead time");
  for (int l : leads) require(l >= 1, "leads", "lead times must be >= 1");
  require(std::set<int>(leads.begin(), leads.end()).size() == leads.size(), "leads", "has duplicates");
  require(train_start >= 0, "train_start", "must be >= 0");
  require(train_end >= 0, "train_end", "must be >= 0");
  require(holdout >= 1, "holdout", "must be >= 1");
  require(exclusion_radius >= 0, "exclusion_radius", "must be >= 0");
  require(priors.m_min >= 1 && priors.m_max >= priors.m_min, "m_min", "need 1 <= m_min <= m_max");
  require(priors.q_min >= 2 && priors.q_max >= priors.q_min, "q_min", "need 2 <= q_min <= q_max");
  require(priors.theta1_shape > 0.0, "theta1_shape", "must be > 0");
  require(priors.theta1_rate > 0.0, "theta1_rate", "must be > 0");
  require(priors.sigma2_shape > 0.0, "sigma2_shape", "must be > 0");
  require(priors.sigma2_rate > 0.0, "sigma2_rate", "must be > 0");
  require(!variants.empty(), "variants", "needs at least one of BA1, BA2, BA3, BA4");
  for (const auto& v : variants)
    require(v == "BA1" || v == "BA2" || v == "BA3" || v == "BA4", "variants", "unknown variant '" + v + "'");
  require(iterations >= 1, "iterations", "must be >= 1");
  require(burn_in >= 0 && burn_in < iterations, "burn_in", "must lie in [0, iterations)");
  require(theta1_step >= 0.0, "theta1_step", "must be >= 0");
  require(gamma_step >= 0.0 && gamma_step <= 1.0, "gamma_step", "must lie in [0, 1]");
  require(thin >= 1, "thin", "must be >= 1");
  for (const auto& b : baselines) {
    try {
      const auto kind = parse_baseline_kind(b);
      require(kind != BaselineKind::kM8, "baselines", "M8 unavailable: the random forest baseline is not provided");
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("config key 'baselines': ") + e.what());
    }
  }
  require(persistence_lag >= 0, "persistence_lag", "must be >= 0");
  for (int l : leads)
    require(persistence_lag == 0 || persistence_lag >= l, "persistence_lag",
            "must be 0 (the lead) or at least every lead time");
  require(jobs >= 0, "jobs", "must be >= 0");
}

bool operator==(const RunConfig& a, const RunConfig& b) { return format_config(a) == format_config(b); }

RunConfig parse_config(const std::string& content, const std::string& source) {
  RunConfig config;
  std::istringstream in(content);
  std::string line;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto t = text::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    const auto where = source + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key(text::trim(t.substr(0, eq)));
    const std::string value(text::trim(t.substr(eq + 1)));
    const auto& table = keys();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Key& k) { return key == k.name; });
    if (it == table.end()) throw ConfigError(where + "unknown config key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + "config key '" + key + "' given twice");
    it->set(config, value);
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::string format_config(const RunConfig& config) {
  std::ostringstream os;
  for (const auto& k : keys()) os << k.name << " = " << k.get(config) << '\n';
  return os.str();
}

void save_config(const std::filesystem::path& path, const RunConfig& config) {
  auto out = text::open_output(path);
  out << format_config(config);
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

std::string config_hash(const RunConfig& config) {
  RunConfig c = config;
  c.out_dir = "-";
  c.jobs = 0;
  c.save_draws = false;
  c.baselines.clear();
  c.persistence_lag = 0;
  c.ac_form = AcForm::kCorrected;
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : format_config(c)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace analogcast
