#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "envi/core/normalization.hpp"
#include "envi/core/types.hpp"
#include "envi/il/networks.hpp"
#include "envi/nn/gaussian_head.hpp"

namespace envi::il {

inline constexpr double kNotApplicable = std::numeric_limits<double>::quiet_NaN();

// One row of the training trace; NaN marks a column the algorithm lacks.
struct EpochRecord {
  std::size_t epoch = 0;
  double loss_bc = kNotApplicable;
  double loss_gail = kNotApplicable;
  double loss_disc = kNotApplicable;
  double mean_reward = kNotApplicable;
};

struct TrainingTrace {
  std::vector<EpochRecord> epochs;
  bool aborted = false;
  std::string abort_reason;
  std::size_t discriminator_updates = 0;
  std::size_t skipped_ppo_steps = 0;
  // False when the moving-average rollout reward fails the trend check.
  bool reward_converged = true;
};

struct Provenance {
  Algorithm algorithm = Algorithm::kBc;
  std::vector<std::size_t> source_logs;
  std::uint64_t seed = 0;
  std::size_t epochs = 0;
};

// A learned transition function plus what is needed to run it.
struct TrainedModel {
  nn::GaussianHead<float> head;
  // Stochastic models sample Normal(mean, exp(log_std)) at simulation time.
  bool stochastic = false;
  NormSpec norm;
  std::size_t history_length = 0;
  Provenance provenance;
  TrainingTrace trace;
};

// Adapts a trained model to the TransitionOracle contract: the window is
// normalized, the mean head (plus Gaussian noise when sampling) predicts the
// next normalized state, and the result is mapped back to color units.
class ModelOracle final : public TransitionOracle {
 public:
  ModelOracle(const TrainedModel& model, bool sample);

  std::size_t window_length() const override { return history_length_; }
  bool deterministic() const override { return !sample_; }
  void reseed(std::uint64_t seed) override { rng_.seed(seed); }
  State step(const HistoryWindow& window) override;

 private:
  nn::GaussianHead<float> head_;
  NormSpec norm_;
  std::size_t history_length_;
  bool sample_;
  std::mt19937_64 rng_;
  std::vector<float> features_;
};

void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);

// CSV `epoch,loss_bc,loss_gail,loss_disc,mean_reward`; empty cell = n/a.
void write_trace_csv(const std::filesystem::path& path, const TrainingTrace& trace);
std::vector<EpochRecord> read_trace_csv(const std::filesystem::path& path);

}  // namespace envi::il
