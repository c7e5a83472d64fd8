#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "envi/core/types.hpp"

namespace envi::verify {

// Draws each next state uniformly from [0, 100] regardless of the window.
class RandomBaseline final : public TransitionOracle {
 public:
  explicit RandomBaseline(std::size_t window_length = 10, std::uint64_t seed = 0);

  std::size_t window_length() const override { return window_length_; }
  bool deterministic() const override { return false; }
  void reseed(std::uint64_t seed) override { rng_.seed(seed); }
  State step(const HistoryWindow& window) override;

 private:
  std::size_t window_length_;
  std::mt19937_64 rng_;
};

}  // namespace envi::verify
