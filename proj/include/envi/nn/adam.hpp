#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "envi/nn/mlp.hpp"

namespace envi::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Moment accumulators shaped like the parameters they update.
template <typename Scalar>
struct AdamState {
  AdamState() = default;
  AdamState(std::size_t parameter_count, AdamConfig cfg)
      : config(cfg),
        first_moment(parameter_count, Scalar(0)),
        second_moment(parameter_count, Scalar(0)) {}

  AdamConfig config;
  std::vector<Scalar> first_moment;
  std::vector<Scalar> second_moment;
  std::int64_t step = 0;
};

// Bias-corrected Adam update. Throws NumericalError without touching
// `params` or `state` when a gradient is not finite.
template <typename Scalar>
void adam_step(std::span<Scalar> params, std::span<const Scalar> grads,
               AdamState<Scalar>& state);

template <typename Scalar>
void adam_step(Mlp<Scalar>& net, std::span<const Scalar> grads, AdamState<Scalar>& state) {
  adam_step<Scalar>(net.parameters(), grads, state);
}

}  // namespace envi::nn
