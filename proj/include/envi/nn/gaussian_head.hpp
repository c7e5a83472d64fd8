#pragma once

#include <cmath>
#include <numbers>

#include "envi/nn/mlp.hpp"

namespace envi::nn {

inline constexpr double kInitialLogStd = -1.0;

// Stochastic model output: Normal(mean_net(x), exp(log_std)^2) with one
// learnable log standard deviation shared by every input.
template <typename Scalar>
struct GaussianHead {
  Mlp<Scalar> mean;
  Scalar log_std = static_cast<Scalar>(kInitialLogStd);

  Scalar stddev() const { return std::exp(log_std); }

  template <typename Other>
  GaussianHead<Other> cast() const {
    return {mean.template cast<Other>(), static_cast<Other>(log_std)};
  }
  friend bool operator==(const GaussianHead&, const GaussianHead&) = default;
};

template <typename Scalar>
Scalar gaussian_log_prob(Scalar value, Scalar mean, Scalar log_std) {
  const Scalar z = (value - mean) / std::exp(log_std);
  return Scalar(-0.5) * z * z - log_std -
         static_cast<Scalar>(0.5 * std::log(2.0 * std::numbers::pi));
}

}  // namespace envi::nn
