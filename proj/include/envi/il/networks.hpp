#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "envi/core/dataset.hpp"
#include "envi/nn/gaussian_head.hpp"
#include "envi/nn/mlp.hpp"

namespace envi::il {

enum class Algorithm { kBc, kGail, kBcxGail };

std::string_view to_string(Algorithm algorithm);  // "BC", "GAIL", "BCxGAIL"
Algorithm parse_algorithm(std::string_view name);

struct BcHyper {
  std::size_t epochs = 300;
  double learning_rate = 5e-5;
  void validate() const;
};

struct GailHyper {
  std::size_t epochs = 300;
  double model_lr = 5e-5;
  double disc_lr = 0.01;
  std::size_t ppo_policy_iters = 10;
  std::size_t ppo_disc_iters = 10;
  double gamma = 0.99;
  double lambda = 0.95;
  double clip_epsilon = 0.2;
  double critic_lr = 1e-3;
  // Step size for the Gaussian head's log_std.
  double log_std_lr = 1e-3;
  void validate() const;
};

// Environment model (Gaussian over a tanh mean network), discriminator over
// window + next state, and the PPO critic over the window.
struct Networks {
  nn::GaussianHead<float> model;
  nn::Mlp<float> discriminator;
  nn::Mlp<float> critic;
};

Networks make_networks(std::size_t history_length, std::uint64_t seed);

// Dataset samples of one source log as column-per-sample matrices.
struct GroupBatch {
  std::size_t source_log = 0;
  double controller_x = 0.0;
  Eigen::MatrixXf inputs;   // 2l x n
  Eigen::MatrixXf targets;  // 1 x n
};

std::vector<GroupBatch> make_group_batches(const Dataset& data);

// Mean squared error of the model's mean head over every sample.
double training_mse(const nn::Mlp<float>& mean, std::span<const GroupBatch> groups);

}  // namespace envi::il
