#include "analogcast/rng.hpp"

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace analogcast {

double Rng::uniform() {
  boost::random::uniform_01<double> dist;
  return dist(engine_);
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  boost::random::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

double Rng::normal(double mean, double sd) { return mean + sd * normal(); }

int Rng::uniform_int(int lo, int hi) {
  boost::random::uniform_int_distribution<int> dist(lo, hi);
  return dist(engine_);
}

double Rng::gamma(double shape, double rate) {
  boost::random::gamma_distribution<double> dist(shape, 1.0 / rate);
  return dist(engine_);
}

double Rng::inverse_gamma(double shape, double rate) { return 1.0 / gamma(shape, rate); }

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = splitmix(base);
  for (std::uint64_t t : tags) h = splitmix(h ^ splitmix(t + 0x632be59bd9b4e019ULL));
  return h;
}

}  // namespace analogcast
