// analogcast: batch driver for the analog forecasting pipeline.

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "analogcast/config.hpp"
#include "analogcast/error.hpp"
#include "analogcast/pipeline.hpp"

namespace ac = analogcast;

int main(int argc, char** argv) {
  CLI::App app{"Bayesian analog forecasting of spatio-temporal fields"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string variant;
  std::optional<int> jobs;
  std::string out;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "flat key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "base random seed");
    sub->add_option("--variant", variant, "model variant")
        ->check(CLI::IsMember({"BA1", "BA2", "BA3", "BA4"}));
    sub->add_option("--jobs", jobs, "concurrent region x lead jobs (0: all cores)")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", out, "output directory");
  };

  auto* synth = app.add_subcommand("synth", "write a synthetic forcing/response pair and regions");
  auto* basis = app.add_subcommand("basis", "compute and write bases per region, variant and lead");
  auto* train = app.add_subcommand("train", "run one chain per region, variant and lead");
  auto* forecast = app.add_subcommand("forecast", "posterior predictive forecasts for the hold-out window");
  auto* evaluate = app.add_subcommand("evaluate", "run baselines and write the scorecard");
  auto* compare = app.add_subcommand("compare", "train, forecast and evaluate, then write comparison tables");
  auto* dump = app.add_subcommand("config", "print the effective configuration");
  for (auto* sub : {synth, basis, train, forecast, evaluate, compare, dump}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ac::RunConfig config = config_path.empty() ? ac::RunConfig{} : ac::load_config(config_path);
    if (seed) config.seed = *seed;
    if (!variant.empty()) config.variants = {variant};
    if (jobs) config.jobs = *jobs;
    if (!out.empty()) config.out_dir = out;
    config.validate();

    if (synth->parsed()) ac::cmd_synth(config, std::cerr);
    else if (basis->parsed()) ac::cmd_basis(config, std::cerr);
    else if (train->parsed()) ac::cmd_train(config, std::cerr);
    else if (forecast->parsed()) ac::cmd_forecast(config, std::cerr);
    else if (evaluate->parsed()) ac::cmd_evaluate(config, std::cerr);
    else if (compare->parsed()) ac::cmd_compare(config, std::cerr);
    else if (dump->parsed()) std::cout << ac::format_config(config);
    return 0;
  } catch (const ac::Error& e) {
    std::cerr << "analogcast: error: " << e.what() << '\n';
    return ac::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "analogcast: error: " << e.what() << '\n';
    return ac::exit_code(ac::ErrorKind::kNumeric);
  }
}
