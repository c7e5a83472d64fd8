#include "envi/verify/random_baseline.hpp"

#include "envi/core/error.hpp"

namespace envi::verify {

RandomBaseline::RandomBaseline(std::size_t window_length, std::uint64_t seed)
    : window_length_(window_length), rng_(seed) {
  if (window_length == 0) throw ConfigError("random baseline window length must be positive");
}

State RandomBaseline::step(const HistoryWindow&) {
  std::uniform_real_distribution<double> uniform(kStateMin, kStateMax);
  return State{uniform(rng_)};
}

}  // namespace envi::verify
