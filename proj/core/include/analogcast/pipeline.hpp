#pragma once

#include <ostream>

#include "analogcast/config.hpp"
#include "analogcast/eval.hpp"

namespace analogcast {

// Batch stages behind the CLI subcommands. Every stage reads inputs named
// by the config (defaulting to the files `synth` writes into out_dir) and
// writes under out_dir:
//
//   forcing.csv, response.csv, auxiliary.csv, regions.csv   synth
//   basis/<variant>_r<region>_lead<lead>_{forcing,response}.csv  basis
//   chains/<variant>_r<region>_lead<lead>.csv (+ .hash)     train
//   forecasts/<model>_r<region>_lead<lead>_{mean,lower,upper}.csv
//   timeseries/<variant>_r<region>_lead<lead>.csv           evaluate
//   scorecard.csv                                           evaluate
//   tables/{mse,ac}_lead<lead>.csv                          compare
//
// Progress goes to `log`. Errors carry the region, variant and lead.

void cmd_synth(const RunConfig& config, std::ostream& log);
void cmd_basis(const RunConfig& config, std::ostream& log);
void cmd_train(const RunConfig& config, std::ostream& log);
void cmd_forecast(const RunConfig& config, std::ostream& log);
ScoreCard cmd_evaluate(const RunConfig& config, std::ostream& log);
/// train, forecast and evaluate, then per-lead model comparison tables.
ScoreCard cmd_compare(const RunConfig& config, std::ostream& log);

}  // namespace analogcast
