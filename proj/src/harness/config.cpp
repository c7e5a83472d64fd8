#include "envi/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>

#include "envi/core/error.hpp"

namespace envi::harness {
namespace {

using nlohmann::json;

void require_object(const json& j, std::string_view what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
}

void reject_unknown(const json& j, std::string_view what,
                    std::initializer_list<std::string_view> keys) {
  require_object(j, what);
  for (const auto& [key, value] : j.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError(std::string(what) + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
void read(const json& j, std::string_view key, T& out) {
  const auto it = j.find(std::string(key));
  if (it == j.end()) return;
  try {
    out = it->template get<T>();
  } catch (const json::exception&) {
    throw ConfigError("key '" + std::string(key) + "' has the wrong type");
  }
}

// Counts arrive as JSON numbers; negative or fractional values are rejected
// instead of wrapping around.
void read_count(const json& j, std::string_view key, std::size_t& out) {
  const auto it = j.find(std::string(key));
  if (it == j.end()) return;
  if (!it->is_number_integer() || it->get<long long>() < 0) {
    throw ConfigError("key '" + std::string(key) + "' must be a non-negative integer");
  }
  out = it->get<std::size_t>();
}

void read_seed(const json& j, std::string_view key, std::uint64_t& out) {
  const auto it = j.find(std::string(key));
  if (it == j.end()) return;
  if (!it->is_number_unsigned()) {
    throw ConfigError("key '" + std::string(key) + "' must be a non-negative integer");
  }
  out = it->get<std::uint64_t>();
}

std::vector<double> read_versions(const json& j, std::string_view key,
                                  std::vector<double> fallback) {
  const auto it = j.find(std::string(key));
  if (it == j.end()) return fallback;
  if (!it->is_array()) throw ConfigError("key '" + std::string(key) + "' must be an array");
  std::vector<double> out;
  for (const auto& v : *it) {
    if (!v.is_number()) throw ConfigError("key '" + std::string(key) + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

bool contains(const std::vector<double>& set, double v) {
  return std::find(set.begin(), set.end(), v) != set.end();
}

}  // namespace

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void CollectConfig::validate() const {
  if (count == 0) throw ConfigError("collect: count must be >= 1");
  if (ticks == 0) throw ConfigError("collect: T must be >= 1");
  if (!(x > 0.0) || x > kActionLimit) throw ConfigError("collect: x must lie in (0, 90]");
  if (!(noise_sigma >= 0.0)) throw ConfigError("collect: noise_sigma must be >= 0");
  env.validate();
}

EnvConstants env_from_json(const json& j) {
  reject_unknown(j, "env", {"k_s", "v", "color_gain", "init_p_range", "noise_sigma",
                            "lane_bounds"});
  EnvConstants c;
  read(j, "k_s", c.steering_gain);
  read(j, "v", c.speed);
  read(j, "color_gain", c.color_gain);
  read(j, "init_p_range", c.init_p_range);
  read(j, "noise_sigma", c.noise_sigma);
  if (j.contains("lane_bounds")) {
    const auto& b = j.at("lane_bounds");
    if (!b.is_array() || b.size() != 2) throw ConfigError("lane_bounds must be [min, max]");
    c.lane_min = b.at(0).get<double>();
    c.lane_max = b.at(1).get<double>();
  }
  c.validate();
  return c;
}

json to_json(const EnvConstants& c) {
  return {{"k_s", c.steering_gain},       {"v", c.speed},
          {"color_gain", c.color_gain},   {"init_p_range", c.init_p_range},
          {"noise_sigma", c.noise_sigma}, {"lane_bounds", {c.lane_min, c.lane_max}}};
}

CollectConfig collect_config_from_json(const json& j) {
  reject_unknown(j, "collect config", {"x", "count", "T", "noise_sigma", "seed", "env"});
  CollectConfig c;
  read(j, "x", c.x);
  read_count(j, "count", c.count);
  read_count(j, "T", c.ticks);
  read(j, "noise_sigma", c.noise_sigma);
  read_seed(j, "seed", c.seed);
  if (j.contains("env")) c.env = env_from_json(j.at("env"));
  c.validate();
  return c;
}

il::BcHyper bc_hyper_from_json(const json& j) {
  reject_unknown(j, "bc", {"epochs", "learning_rate"});
  il::BcHyper h;
  read_count(j, "epochs", h.epochs);
  read(j, "learning_rate", h.learning_rate);
  h.validate();
  return h;
}

il::GailHyper gail_hyper_from_json(const json& j) {
  reject_unknown(j, "gail", {"epochs", "model_lr", "disc_lr", "ppo_policy_iters",
                             "ppo_disc_iters", "gamma", "lambda", "clip_epsilon", "critic_lr",
                             "log_std_lr"});
  il::GailHyper h;
  read_count(j, "epochs", h.epochs);
  read(j, "model_lr", h.model_lr);
  read(j, "disc_lr", h.disc_lr);
  read_count(j, "ppo_policy_iters", h.ppo_policy_iters);
  read_count(j, "ppo_disc_iters", h.ppo_disc_iters);
  read(j, "gamma", h.gamma);
  read(j, "lambda", h.lambda);
  read(j, "clip_epsilon", h.clip_epsilon);
  read(j, "critic_lr", h.critic_lr);
  read(j, "log_std_lr", h.log_std_lr);
  h.validate();
  return h;
}

json to_json(const il::BcHyper& h) {
  return {{"epochs", h.epochs}, {"learning_rate", h.learning_rate}};
}

json to_json(const il::GailHyper& h) {
  return {{"epochs", h.epochs},
          {"model_lr", h.model_lr},
          {"disc_lr", h.disc_lr},
          {"ppo_policy_iters", h.ppo_policy_iters},
          {"ppo_disc_iters", h.ppo_disc_iters},
          {"gamma", h.gamma},
          {"lambda", h.lambda},
          {"clip_epsilon", h.clip_epsilon},
          {"critic_lr", h.critic_lr},
          {"log_std_lr", h.log_std_lr}};
}

TrainingConfig training_config_from_json(const json& j) {
  reject_unknown(j, "training config", {"bc", "gail"});
  TrainingConfig c;
  if (j.contains("bc")) c.bc = bc_hyper_from_json(j.at("bc"));
  if (j.contains("gail")) c.gail = gail_hyper_from_json(j.at("gail"));
  return c;
}

verify::BandSpec band_from_json(const json& j) {
  const json& b = j.contains("band") ? j.at("band") : j;
  reject_unknown(b, "band", {"center", "half_width"});
  verify::BandSpec band;
  read(b, "center", band.center);
  read(b, "half_width", band.half_width);
  band.validate();
  return band;
}

std::string_view to_string(UseCase use_case) {
  switch (use_case) {
    case UseCase::kTovk: return "TOVK";
    case UseCase::kTmvk: return "TMVK";
    case UseCase::kTmvu: return "TMVU";
  }
  return "?";
}

UseCase parse_use_case(std::string_view text) {
  if (text == "TOVK") return UseCase::kTovk;
  if (text == "TMVK") return UseCase::kTmvk;
  if (text == "TMVU") return UseCase::kTmvu;
  throw ConfigError("unknown use case '" + std::string(text) + "'");
}

std::string AlgorithmChoice::name() const {
  return random ? std::string("RANDOM") : std::string(il::to_string(trainer));
}

AlgorithmChoice AlgorithmChoice::parse(std::string_view text) {
  if (text == "RANDOM") return {true, il::Algorithm::kBc};
  return {false, il::parse_algorithm(text)};
}

void ExperimentPlan::validate() const {
  if (training_versions.empty()) throw ConfigError("plan: training_versions is empty");
  if (verification_versions.empty()) throw ConfigError("plan: verification_versions is empty");
  for (const auto* set : {&training_versions, &verification_versions}) {
    const std::set<double> unique(set->begin(), set->end());
    if (unique.size() != set->size()) throw ConfigError("plan: duplicate controller version");
    for (double x : *set) {
      if (!(x > 0.0) || x > kActionLimit) {
        throw ConfigError("plan: controller version must lie in (0, 90]");
      }
    }
  }
  switch (use_case) {
    case UseCase::kTovk:
      if (training_versions.size() != 1 || verification_versions != training_versions) {
        throw ConfigError("plan: TOVK trains and verifies the same single version");
      }
      break;
    case UseCase::kTmvk:
      if (training_versions.size() < 2) {
        throw ConfigError("plan: TMVK needs more than one training version");
      }
      for (double x : verification_versions) {
        if (!contains(training_versions, x)) {
          throw ConfigError("plan: TMVK verification versions must be training versions");
        }
      }
      break;
    case UseCase::kTmvu:
      for (double x : verification_versions) {
        if (contains(training_versions, x)) {
          throw ConfigError("plan: TMVU verification versions must not be trained on");
        }
      }
      break;
  }
  if (log_counts.empty()) throw ConfigError("plan: log_counts is empty");
  for (std::size_t n : log_counts) {
    if (n == 0 || n > train_pool_size) {
      throw ConfigError("plan: log counts must lie in [1, train_pool_size]");
    }
  }
  if (algorithms.empty()) throw ConfigError("plan: no algorithms");
  if (repetitions == 0) throw ConfigError("plan: repetitions must be >= 1");
  if (runs == 0) throw ConfigError("plan: runs must be >= 1");
  if (eval_pool_size == 0) throw ConfigError("plan: eval_pool_size must be >= 1");
  if (history_length == 0 || history_length > ticks) {
    throw ConfigError("plan: history_length must lie in [1, T]");
  }
  if (!(noise_sigma >= 0.0)) throw ConfigError("plan: noise_sigma must be >= 0");
  bc.validate();
  gail.validate();
  band.validate();
  env.validate();
}

ExperimentPlan default_plan(UseCase use_case) {
  ExperimentPlan p;
  p.use_case = use_case;
  switch (use_case) {
    case UseCase::kTovk:
      break;
    case UseCase::kTmvk:
      p.training_versions = {10.0, 30.0, 50.0};
      p.verification_versions = p.training_versions;
      break;
    case UseCase::kTmvu:
      p.training_versions = {10.0, 30.0, 50.0};
      p.verification_versions = {20.0, 40.0};
      break;
  }
  return p;
}

ExperimentPlan plan_from_json(const json& j) {
  reject_unknown(j, "plan",
                 {"use_case", "training_versions", "verification_versions", "log_counts",
                  "algorithms", "repetitions", "runs", "seed", "history_length", "T",
                  "noise_sigma", "train_pool_size", "eval_pool_size", "bc", "gail", "band",
                  "env"});
  ExperimentPlan p = default_plan(
      j.contains("use_case") ? parse_use_case(j.at("use_case").get<std::string>()) : UseCase::kTovk);
  p.training_versions = read_versions(j, "training_versions", p.training_versions);
  // Verifying what was trained is the natural default except for TMVU.
  p.verification_versions =
      read_versions(j, "verification_versions",
                    p.use_case == UseCase::kTmvu ? p.verification_versions : p.training_versions);
  if (j.contains("log_counts")) {
    p.log_counts.clear();
    for (const auto& v : j.at("log_counts")) {
      if (!v.is_number_integer() || v.get<long long>() < 1) {
        throw ConfigError("plan: log_counts must hold positive integers");
      }
      p.log_counts.push_back(v.get<std::size_t>());
    }
  }
  if (j.contains("algorithms")) {
    p.algorithms.clear();
    for (const auto& v : j.at("algorithms")) {
      const auto choice = AlgorithmChoice::parse(v.get<std::string>());
      if (std::find(p.algorithms.begin(), p.algorithms.end(), choice) != p.algorithms.end()) {
        throw ConfigError("plan: duplicate algorithm " + choice.name());
      }
      p.algorithms.push_back(choice);
    }
  }
  read_count(j, "repetitions", p.repetitions);
  read_count(j, "runs", p.runs);
  read_seed(j, "seed", p.seed);
  read_count(j, "history_length", p.history_length);
  read_count(j, "T", p.ticks);
  read(j, "noise_sigma", p.noise_sigma);
  read_count(j, "train_pool_size", p.train_pool_size);
  read_count(j, "eval_pool_size", p.eval_pool_size);
  if (j.contains("bc")) p.bc = bc_hyper_from_json(j.at("bc"));
  if (j.contains("gail")) p.gail = gail_hyper_from_json(j.at("gail"));
  if (j.contains("band")) p.band = band_from_json(j.at("band"));
  if (j.contains("env")) p.env = env_from_json(j.at("env"));
  p.validate();
  return p;
}

json to_json(const ExperimentPlan& p) {
  json algorithms = json::array();
  for (const auto& a : p.algorithms) algorithms.push_back(a.name());
  return {{"use_case", std::string(to_string(p.use_case))},
          {"training_versions", p.training_versions},
          {"verification_versions", p.verification_versions},
          {"log_counts", p.log_counts},
          {"algorithms", algorithms},
          {"repetitions", p.repetitions},
          {"runs", p.runs},
          {"seed", p.seed},
          {"history_length", p.history_length},
          {"T", p.ticks},
          {"noise_sigma", p.noise_sigma},
          {"train_pool_size", p.train_pool_size},
          {"eval_pool_size", p.eval_pool_size},
          {"bc", to_json(p.bc)},
          {"gail", to_json(p.gail)},
          {"band", {{"center", p.band.center}, {"half_width", p.band.half_width}}},
          {"env", to_json(p.env)}};
}

}  // namespace envi::harness
