#pragma once

#include <cstddef>
#include <cstdint>

#include "envi/core/types.hpp"

namespace envi {

// Closed-loop simulation of `controller` against `oracle`.
//
// The returned trajectory starts with the pairs of `init` and grows by `steps`
// pairs. Each tick the oracle sees the trailing window, its output is clamped
// into [0, 100] (counted in meta.clamp_count) and the controller reacts to the
// clamped state. The oracle is reseeded with `seed` before the first tick.
// meta.seed is set; controller_x and origin are left for the caller.
Trajectory rollout(TransitionOracle& oracle, const Controller& controller,
                   const HistoryWindow& init, std::size_t steps,
                   std::uint64_t seed);

// First `length` pairs of `log`, unchanged.
HistoryWindow extract_sigma0(const Trajectory& log, std::size_t length);

}  // namespace envi
