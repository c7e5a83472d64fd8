#pragma once

#include <nlohmann/json.hpp>

#include "envi/nn/mlp.hpp"

namespace envi::nn {

// {"input_dim": n, "layers": [{"outputs": m, "activation": "tanh"}, ...]}
nlohmann::ordered_json architecture_to_json(const Architecture& arch);
Architecture architecture_from_json(const nlohmann::json& j);

// Architecture plus per-layer "weight" (row-major nested arrays) and "bias".
// Values are written as doubles, so float parameters round-trip exactly.
template <typename Scalar>
nlohmann::ordered_json mlp_to_json(const Mlp<Scalar>& net);
template <typename Scalar>
Mlp<Scalar> mlp_from_json(const nlohmann::json& j);

}  // namespace envi::nn
