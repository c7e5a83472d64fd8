#include "envi/core/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "envi/core/error.hpp"

namespace envi {

Trajectory rollout(TransitionOracle& oracle, const Controller& controller,
                   const HistoryWindow& init, std::size_t steps,
                   std::uint64_t seed) {
  if (steps == 0) throw ConfigError("rollout needs at least one step");
  if (init.length() != oracle.window_length()) {
    throw ConfigError("initial window has " + std::to_string(init.length()) +
                      " pairs, oracle expects " +
                      std::to_string(oracle.window_length()));
  }
  oracle.reseed(seed);

  Trajectory traj;
  traj.meta.seed = seed;
  traj.pairs.reserve(init.length() + steps);
  traj.pairs.assign(init.pairs().begin(), init.pairs().end());

  HistoryWindow window = init;
  for (std::size_t t = 0; t < steps; ++t) {
    double value = oracle.step(window).value;
    if (std::isnan(value)) throw NumericalError("oracle produced NaN state");
    if (value < kStateMin || value > kStateMax) {
      value = std::clamp(value, kStateMin, kStateMax);
      ++traj.meta.clamp_count;
    }
    const State state{value};
    const StateActionPair pair{state, controller.decide(state)};
    traj.pairs.push_back(pair);
    window = window.slid(pair);
  }
  return traj;
}

HistoryWindow extract_sigma0(const Trajectory& log, std::size_t length) {
  if (length == 0) throw ConfigError("sigma0 length must be positive");
  if (log.size() < length) {
    throw ConfigError("log of " + std::to_string(log.size()) +
                      " pairs is shorter than sigma0 length " +
                      std::to_string(length));
  }
  return HistoryWindow({log.pairs.begin(),
                        log.pairs.begin() + static_cast<std::ptrdiff_t>(length)});
}

}  // namespace envi
