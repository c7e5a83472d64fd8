#include "envi/il/networks.hpp"

#include <string>

#include "envi/core/error.hpp"
#include "envi/core/seeds.hpp"

namespace envi::il {

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kBc: return "BC";
    case Algorithm::kGail: return "GAIL";
    case Algorithm::kBcxGail: return "BCxGAIL";
  }
  return "BC";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "BC") return Algorithm::kBc;
  if (name == "GAIL") return Algorithm::kGail;
  if (name == "BCxGAIL") return Algorithm::kBcxGail;
  throw ConfigError("unknown algorithm '" + std::string(name) +
                    "' (expected BC, GAIL or BCxGAIL)");
}

void BcHyper::validate() const {
  if (epochs < 1) throw ConfigError("BC epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("BC learning rate must be > 0");
}

void GailHyper::validate() const {
  if (epochs < 1) throw ConfigError("GAIL epochs must be >= 1");
  if (!(model_lr > 0.0) || !(disc_lr > 0.0) || !(critic_lr > 0.0) ||
      !(log_std_lr > 0.0)) {
    throw ConfigError("GAIL learning rates must be > 0");
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");
  if (!(clip_epsilon > 0.0)) throw ConfigError("clip epsilon must be > 0");
  if (ppo_policy_iters < 1 || ppo_disc_iters < 1) {
    throw ConfigError("PPO iteration counts must be >= 1");
  }
}

Networks make_networks(std::size_t history_length, std::uint64_t seed) {
  if (history_length == 0) throw ConfigError("history length must be positive");
  const std::size_t features = 2 * history_length;
  return {
      {nn::Mlp<float>::initialized(nn::environment_model_architecture(features),
                                   derive_seed(seed, "model")),
       static_cast<float>(nn::kInitialLogStd)},
      nn::Mlp<float>::initialized(nn::discriminator_architecture(features + 1),
                                  derive_seed(seed, "discriminator")),
      nn::Mlp<float>::initialized(nn::critic_architecture(features),
                                  derive_seed(seed, "critic")),
  };
}

std::vector<GroupBatch> make_group_batches(const Dataset& data) {
  std::vector<GroupBatch> out;
  const auto dim = static_cast<Eigen::Index>(data.feature_dim());
  for (const auto& group : data.groups()) {
    GroupBatch batch;
    batch.source_log = group.source_log;
    batch.controller_x = group.controller_x;
    const auto n = static_cast<Eigen::Index>(group.samples.size());
    batch.inputs.resize(dim, n);
    batch.targets.resize(1, n);
    for (Eigen::Index c = 0; c < n; ++c) {
      const Sample& s = group.samples[static_cast<std::size_t>(c)];
      for (Eigen::Index r = 0; r < dim; ++r) {
        batch.inputs(r, c) = static_cast<float>(s.input[static_cast<std::size_t>(r)]);
      }
      batch.targets(0, c) = static_cast<float>(s.target);
    }
    out.push_back(std::move(batch));
  }
  return out;
}

double training_mse(const nn::Mlp<float>& mean, std::span<const GroupBatch> groups) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& g : groups) {
    const Eigen::MatrixXf pred = mean.forward(g.inputs);
    total += (pred - g.targets).cast<double>().squaredNorm();
    count += static_cast<std::size_t>(g.targets.cols());
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

}  // namespace envi::il
