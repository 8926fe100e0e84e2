#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace analogcast {

/// Seeded random source. Draws go through Boost.Random distributions so a
/// fixed seed yields the same stream on every platform (the std::
/// distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();                     // [0, 1)
  double uniform(double lo, double hi); // [lo, hi)
  double normal();                      // N(0, 1)
  double normal(double mean, double sd);
  int uniform_int(int lo, int hi);      // inclusive
  double gamma(double shape, double rate);
  double inverse_gamma(double shape, double rate);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Mixes a base seed with job tags (region, lead, ...) into an independent
/// stream seed. SplitMix64 finalizer.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags);

}  // namespace analogcast
