#include "envi/nn/serialization.hpp"

#include <cmath>
#include <string>

#include "envi/core/error.hpp"

namespace envi::nn {

nlohmann::ordered_json architecture_to_json(const Architecture& arch) {
  nlohmann::ordered_json layers = nlohmann::ordered_json::array();
  for (const auto& layer : arch.layers) {
    layers.push_back({{"outputs", layer.outputs},
                      {"activation", std::string(to_string(layer.activation))}});
  }
  return {{"input_dim", arch.input_dim}, {"layers", std::move(layers)}};
}

Architecture architecture_from_json(const nlohmann::json& j) {
  Architecture arch;
  arch.input_dim = j.at("input_dim").get<std::size_t>();
  for (const auto& layer : j.at("layers")) {
    arch.layers.push_back({layer.at("outputs").get<std::size_t>(),
                           parse_activation(layer.at("activation").get<std::string>())});
  }
  arch.validate();
  return arch;
}

template <typename Scalar>
nlohmann::ordered_json mlp_to_json(const Mlp<Scalar>& net) {
  nlohmann::ordered_json params = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < net.layer_count(); ++k) {
    const auto w = net.weight(k);
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(w.cols()));
      for (Eigen::Index c = 0; c < w.cols(); ++c) row[static_cast<std::size_t>(c)] = w(r, c);
      rows.push_back(std::move(row));
    }
    const auto b = net.bias(k);
    std::vector<double> bias(b.data(), b.data() + b.size());
    params.push_back({{"weight", std::move(rows)}, {"bias", std::move(bias)}});
  }
  return {{"architecture", architecture_to_json(net.architecture())},
          {"parameters", std::move(params)}};
}

template <typename Scalar>
Mlp<Scalar> mlp_from_json(const nlohmann::json& j) {
  try {
    Mlp<Scalar> net(architecture_from_json(j.at("architecture")));
    const auto& params = j.at("parameters");
    if (params.size() != net.layer_count()) throw ConfigError("model file: layer count mismatch");
    for (std::size_t k = 0; k < net.layer_count(); ++k) {
      auto w = net.weight(k);
      const auto& rows = params[k].at("weight");
      if (rows.size() != static_cast<std::size_t>(w.rows())) {
        throw ConfigError("model file: weight rows mismatch in layer " + std::to_string(k));
      }
      for (Eigen::Index r = 0; r < w.rows(); ++r) {
        const auto& row = rows[static_cast<std::size_t>(r)];
        if (row.size() != static_cast<std::size_t>(w.cols())) {
          throw ConfigError("model file: weight cols mismatch in layer " + std::to_string(k));
        }
        for (Eigen::Index c = 0; c < w.cols(); ++c) {
          w(r, c) = static_cast<Scalar>(row[static_cast<std::size_t>(c)].get<double>());
        }
      }
      auto b = net.bias(k);
      const auto& bias = params[k].at("bias");
      if (bias.size() != static_cast<std::size_t>(b.size())) {
        throw ConfigError("model file: bias size mismatch in layer " + std::to_string(k));
      }
      for (Eigen::Index i = 0; i < b.size(); ++i) {
        b[i] = static_cast<Scalar>(bias[static_cast<std::size_t>(i)].get<double>());
      }
    }
    if (!net.all_finite()) throw ConfigError("model file: non-finite parameter");
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model file: ") + e.what());
  }
}

template nlohmann::ordered_json mlp_to_json<float>(const Mlp<float>&);
template nlohmann::ordered_json mlp_to_json<double>(const Mlp<double>&);
template Mlp<float> mlp_from_json<float>(const nlohmann::json&);
template Mlp<double> mlp_from_json<double>(const nlohmann::json&);

}  // namespace envi::nn
