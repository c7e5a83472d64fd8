#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "envi/il/networks.hpp"
#include "envi/reference/lane_world.hpp"
#include "envi/verify/metrics.hpp"

namespace envi::harness {

// Every config is a JSON object. Unknown keys are rejected so that typos
// fail loudly instead of silently falling back to defaults.
nlohmann::json read_json_file(const std::filesystem::path& path);

struct CollectConfig {
  double x = 30.0;
  std::size_t count = 30;
  std::size_t ticks = 25;
  double noise_sigma = 0.5;
  std::uint64_t seed = 0;
  EnvConstants env;

  void validate() const;
};

CollectConfig collect_config_from_json(const nlohmann::json& j);

il::BcHyper bc_hyper_from_json(const nlohmann::json& j);
il::GailHyper gail_hyper_from_json(const nlohmann::json& j);
nlohmann::json to_json(const il::BcHyper& hyper);
nlohmann::json to_json(const il::GailHyper& hyper);

// Training config: {"bc": {...}, "gail": {...}} with hyperparameter names
// (epochs, learning_rate / model_lr, disc_lr, ppo_policy_iters, ...).
struct TrainingConfig {
  il::BcHyper bc;
  il::GailHyper gail;
};
TrainingConfig training_config_from_json(const nlohmann::json& j);

verify::BandSpec band_from_json(const nlohmann::json& j);
EnvConstants env_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EnvConstants& env);

enum class UseCase { kTovk, kTmvk, kTmvu };
std::string_view to_string(UseCase use_case);
UseCase parse_use_case(std::string_view text);

// "RANDOM" or one of the trainer names.
struct AlgorithmChoice {
  bool random = false;
  il::Algorithm trainer = il::Algorithm::kBc;

  std::string name() const;
  static AlgorithmChoice parse(std::string_view text);
  friend bool operator==(const AlgorithmChoice&, const AlgorithmChoice&) = default;
};

struct ExperimentPlan {
  UseCase use_case = UseCase::kTovk;
  std::vector<double> training_versions{30.0};
  std::vector<double> verification_versions{30.0};
  // Training logs per training version.
  std::vector<std::size_t> log_counts{3, 6, 9, 12, 15, 18, 21, 24, 27, 30};
  std::vector<AlgorithmChoice> algorithms{{false, il::Algorithm::kBc},
                                          {false, il::Algorithm::kGail},
                                          {false, il::Algorithm::kBcxGail},
                                          {true, il::Algorithm::kBc}};
  std::size_t repetitions = 30;
  std::size_t runs = 100;
  std::uint64_t seed = 0;
  std::size_t history_length = 10;
  std::size_t ticks = 25;
  double noise_sigma = 0.5;
  std::size_t train_pool_size = 30;
  std::size_t eval_pool_size = 100;
  il::BcHyper bc;
  il::GailHyper gail;
  verify::BandSpec band;
  EnvConstants env;

  // Throws ConfigError naming the violated rule.
  void validate() const;
};

// Versions of the lane-keeping case study: TOVK trains and verifies x=30,
// TMVK uses {10, 30, 50} for both, TMVU trains on {10, 30, 50} and verifies
// {20, 40}. Other fields keep their member defaults.
ExperimentPlan default_plan(UseCase use_case);

// Missing keys fall back to default_plan(use_case).
ExperimentPlan plan_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentPlan& plan);

}  // namespace envi::harness
