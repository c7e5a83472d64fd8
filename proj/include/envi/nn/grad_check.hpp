#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "envi/nn/mlp.hpp"

namespace envi::nn {

struct GradCheckResult {
  // Largest |analytic - numeric| / max(|analytic|, |numeric|, kGradCheckFloor).
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  // Flat parameter indices whose +-h probes straddle a ReLU kink.
  std::vector<std::size_t> excluded;
};

inline constexpr double kGradCheckFloor = 1e-6;

// Compares backward() against central finite differences of the probe loss
// sum(forward(input)) for every parameter. Perturbing one parameter touches a
// single pre-activation, so the perturbed forward passes start from that
// layer instead of the input.
GradCheckResult grad_check(const Mlp<double>& net, std::span<const double> input,
                           double h = 1e-5);
GradCheckResult grad_check(const Mlp<float>& net, std::span<const double> input,
                           double h = 1e-5);

}  // namespace envi::nn
