#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "envi/core/dataset.hpp"
#include "envi/core/types.hpp"
#include "envi/il/networks.hpp"
#include "envi/il/trained_model.hpp"
#include "envi/nn/adam.hpp"

namespace envi::il {

// Reward for a discriminator score d in (0, 1): -log(1 - d + 1e-8).
double gail_reward(double discriminator_score);
double gail_reward(const nn::Mlp<float>& discriminator, const HistoryWindow& window,
                   State predicted, const NormSpec& norm);

// Discriminator logit-space binary cross-entropy, real columns labeled 1 and
// fake columns labeled 0. Each column is a window followed by a next state.
double discriminator_loss(const nn::Mlp<float>& discriminator, const Eigen::MatrixXf& real,
                          const Eigen::MatrixXf& fake);

// `iters` Adam steps on discriminator_loss; returns the loss seen by the
// last step (before it was applied).
double discriminator_update(nn::Mlp<float>& discriminator, nn::AdamState<float>& optimizer,
                            const Eigen::MatrixXf& real, const Eigen::MatrixXf& fake,
                            std::size_t iters);

struct AdvantageEstimate {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// Generalized advantage estimation. `values` carries one more entry than
// `rewards`: the bootstrap value after the last step.
AdvantageEstimate compute_gae(std::span<const double> rewards, std::span<const double> values,
                              double gamma, double lambda);

// Per-tick records of one simulated GAIL episode.
struct RolloutBuffer {
  Eigen::MatrixXf windows;           // 2l x n, normalized model inputs
  std::vector<float> samples;        // drawn next states (normalized, unclipped)
  std::vector<double> rewards;
  std::vector<double> values;        // critic estimate per window
  std::vector<double> log_probs;     // under the sampling policy
  double bootstrap_value = 0.0;      // critic estimate after the last step
  std::vector<double> advantages;    // filled by attach_advantages()
  std::vector<double> returns;

  std::size_t size() const { return rewards.size(); }
  bool has_advantages() const { return advantages.size() == rewards.size() && !rewards.empty(); }
};

void attach_advantages(RolloutBuffer& buffer, double gamma, double lambda);

// Simulates `horizon` ticks of the model in closed loop with `controller`,
// starting from `first_window`. A drawn state is clipped into [-1, 1] before
// it is scored, shown to the controller and pushed into the window. With
// `deterministic`, the mean is used instead of a sample.
RolloutBuffer collect_gail_rollout(const nn::GaussianHead<float>& model,
                                   const nn::Mlp<float>& critic,
                                   const nn::Mlp<float>& discriminator,
                                   const Controller& controller,
                                   std::span<const float> first_window, std::size_t horizon,
                                   const NormSpec& norm, std::mt19937_64& rng,
                                   bool deterministic = false);

// mean_i min(r_i A_i, clip(r_i, 1 - eps, 1 + eps) A_i)
double clipped_surrogate(std::span<const double> ratios, std::span<const double> advantages,
                         double clip_epsilon);

struct PpoOptimizers {
  nn::AdamState<float> model;
  nn::AdamState<float> log_std;
  nn::AdamState<float> critic;
};

PpoOptimizers make_ppo_optimizers(const Networks& nets, const GailHyper& hyper);

struct PpoStats {
  double policy_loss = 0.0;  // negated clipped surrogate of the last iteration
  double value_loss = 0.0;
  std::size_t skipped_steps = 0;
};

// `ppo_policy_iters` Adam steps on the clipped surrogate (model mean and
// log_std) and on the critic's squared error against the returns.
// Advantages are standardized over the buffer when it holds two or more
// records. A policy step whose |log ratio| exceeds 20 anywhere is skipped.
PpoStats ppo_update(nn::GaussianHead<float>& model, nn::Mlp<float>& critic,
                    const RolloutBuffer& buffer, const GailHyper& hyper,
                    PpoOptimizers& optimizers);

// Controller that produced a given source log, looked up by its parameter x.
using ControllerLookup = std::function<const Controller&(double controller_x)>;

// Which model updates run each epoch. GAIL = {true, false}; BCxGAIL = {true, true}.
struct UpdateTerms {
  bool gail = true;
  bool bc = false;
};

TrainedModel train_gail(Networks nets, const ControllerLookup& controllers,
                        const Dataset& data, const GailHyper& hyper, std::uint64_t seed);
TrainedModel train_gail(Networks nets, const Controller& controller, const Dataset& data,
                        const GailHyper& hyper, std::uint64_t seed);

// GAIL plus a behavior-cloning MSE step on each source log after its PPO
// update. The BC step uses hyper.model_lr and its own Adam state.
TrainedModel train_bcxgail(Networks nets, const ControllerLookup& controllers,
                           const Dataset& data, const GailHyper& hyper, std::uint64_t seed,
                           UpdateTerms terms = {true, true});
TrainedModel train_bcxgail(Networks nets, const Controller& controller, const Dataset& data,
                           const GailHyper& hyper, std::uint64_t seed,
                           UpdateTerms terms = {true, true});

// True when the `window`-epoch moving average of mean rollout reward never
// decreases over the last `tail` epochs.
bool reward_trend_non_decreasing(std::span<const EpochRecord> epochs, std::size_t window = 30,
                                 std::size_t tail = 200);

}  // namespace envi::il
