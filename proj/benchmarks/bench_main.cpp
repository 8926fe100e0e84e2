#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "analogcast/bayes.hpp"
#include "analogcast/kernel.hpp"
#include "analogcast/metric.hpp"
#include "analogcast/simulate.hpp"

namespace {

namespace ac = analogcast;

Eigen::MatrixXd random_matrix(int rows, int cols, std::mt19937_64& gen) {
  std::normal_distribution<double> n;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = n(gen);
  return m;
}

// Args: p (forcing coefficients), q (embedding depth).
void BM_ProcrustesDistance(benchmark::State& state) {
  std::mt19937_64 gen(1);
  const int p = static_cast<int>(state.range(0)), q = static_cast<int>(state.range(1));
  const auto t = random_matrix(p, q, gen), c = random_matrix(p, q, gen);
  for (auto _ : state) benchmark::DoNotOptimize(ac::procrustes_distance(t, c));
}
BENCHMARK(BM_ProcrustesDistance)->Args({10, 4})->Args({10, 24})->Args({30, 12});

// Arg: candidate pool size; m is fixed at 15.
void BM_KernelWeights(benchmark::State& state) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::vector<ac::Candidate> c;
  for (int i = 0; i < state.range(0); ++i) c.push_back({i + 1, u(gen)});
  for (auto _ : state) benchmark::DoNotOptimize(ac::kernel_weights(c, 0.1, 15));
}
BENCHMARK(BM_KernelWeights)->Arg(40)->Arg(400);

// One full sweep of the sampler on simulated data.
void BM_SamplerSweep(benchmark::State& state) {
  ac::AnalogSimSpec spec;
  spec.seed = 3;
  const auto sim = ac::simulate_analog_data(spec);
  ac::AnalogModel model(sim.distances, sim.responses, sim.index);
  const ac::PriorConfig priors;
  ac::Sampler sampler(model, priors, ac::SamplerConfig{});
  sampler.reset(ac::initial_state(priors));
  ac::Rng rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(sampler.step(rng));
}
BENCHMARK(BM_SamplerSweep);

}  // namespace

BENCHMARK_MAIN();
