#include "envi/nn/adam.hpp"

#include <cmath>

#include "envi/core/error.hpp"

namespace envi::nn {

template <typename Scalar>
void adam_step(std::span<Scalar> params, std::span<const Scalar> grads,
               AdamState<Scalar>& state) {
  if (grads.size() != params.size() || state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size()) {
    throw ConfigError("adam_step: gradient/state shape does not match parameters");
  }
  if (!all_finite<Scalar>(grads)) {
    throw NumericalError("adam_step: non-finite gradient, update skipped");
  }
  const auto& cfg = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const auto b1 = static_cast<Scalar>(cfg.beta1);
  const auto b2 = static_cast<Scalar>(cfg.beta2);
  const auto step_size = static_cast<Scalar>(cfg.learning_rate / (1.0 - std::pow(cfg.beta1, t)));
  const auto inv_sqrt_c2 = static_cast<Scalar>(1.0 / std::sqrt(1.0 - std::pow(cfg.beta2, t)));
  const auto eps = static_cast<Scalar>(cfg.epsilon);

  Scalar* __restrict p = params.data();
  const Scalar* __restrict gp = grads.data();
  Scalar* __restrict m = state.first_moment.data();
  Scalar* __restrict v = state.second_moment.data();
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i] = b1 * m[i] + (Scalar(1) - b1) * gp[i];
    v[i] = b2 * v[i] + (Scalar(1) - b2) * gp[i] * gp[i];
    p[i] -= step_size * m[i] / (std::sqrt(v[i]) * inv_sqrt_c2 + eps);
  }
}

template void adam_step<float>(std::span<float>, std::span<const float>, AdamState<float>&);
template void adam_step<double>(std::span<double>, std::span<const double>,
                                AdamState<double>&);

}  // namespace envi::nn
