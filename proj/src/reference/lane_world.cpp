#include "envi/reference/lane_world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "envi/core/error.hpp"
#include "envi/core/rollout.hpp"

namespace envi {

void EnvConstants::validate() const {
  const double all[] = {steering_gain, speed, color_gain, init_p_range,
                        noise_sigma,   lane_min, lane_max};
  for (double v : all) {
    if (!std::isfinite(v)) throw ConfigError("environment constants must be finite");
  }
  if (noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");
  if (init_p_range < 0.0) throw ConfigError("init_p_range must be >= 0");
  if (!(lane_min < lane_max)) throw ConfigError("lane bounds must satisfy min < max");
  if (init_p_range > lane_max || -init_p_range < lane_min) {
    throw ConfigError("init_p_range exceeds lane bounds");
  }
}

EnvConstants load_env_constants(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  EnvConstants c;
  try {
    const auto j = nlohmann::json::parse(in);
    c.steering_gain = j.value("k_s", c.steering_gain);
    c.speed = j.value("v", c.speed);
    c.color_gain = j.value("color_gain", c.color_gain);
    c.init_p_range = j.value("init_p_range", c.init_p_range);
    c.noise_sigma = j.value("noise_sigma", c.noise_sigma);
    if (j.contains("lane_bounds")) {
      c.lane_min = j.at("lane_bounds").at(0).get<double>();
      c.lane_max = j.at("lane_bounds").at(1).get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  c.validate();
  return c;
}

void save_env_constants(const std::filesystem::path& path, const EnvConstants& c) {
  const nlohmann::ordered_json j = {
      {"k_s", c.steering_gain},         {"v", c.speed},
      {"color_gain", c.color_gain},     {"init_p_range", c.init_p_range},
      {"noise_sigma", c.noise_sigma},   {"lane_bounds", {c.lane_min, c.lane_max}},
  };
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

Action controller_decide(State color, ControllerConfig cfg) {
  if (color.value > kGrayColor) return Action{cfg.x};
  if (color.value < kGrayColor) return Action{-cfg.x};
  return Action{0.0};
}

LaneKeepingController::LaneKeepingController(ControllerConfig cfg) : cfg_(cfg) {
  if (!(cfg.x > 0.0)) throw ConfigError("controller x must be positive");
}

State observe(LaneWorld& world, const EnvConstants& constants) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double noise = world.noise_sigma * gauss(world.rng);
  const double color = kGrayColor + constants.color_gain * world.p + noise;
  return State{std::clamp(color, kStateMin, kStateMax)};
}

std::pair<LaneWorld, State> oracle_step(LaneWorld world, Action last_action,
                                        const EnvConstants& constants) {
  world.theta -= constants.steering_gain * last_action.value * std::numbers::pi / 180.0;
  world.p = std::clamp(world.p + constants.speed * std::sin(world.theta),
                       constants.lane_min, constants.lane_max);
  const State color = observe(world, constants);
  return {std::move(world), color};
}

ReferenceOracle::ReferenceOracle(LaneWorld world, EnvConstants constants)
    : world_(std::move(world)), constants_(constants) {
  constants_.validate();
  if (world_.noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");
}

State ReferenceOracle::step(const HistoryWindow& window) {
  auto [next, color] = oracle_step(std::move(world_), window.newest().action, constants_);
  world_ = std::move(next);
  return color;
}

std::vector<Trajectory> collect_fot_logs(ControllerConfig cfg, std::size_t count,
                                         std::size_t ticks, double noise_sigma,
                                         std::uint64_t base_seed,
                                         const EnvConstants& constants) {
  if (count == 0) throw ConfigError("log count must be positive");
  if (ticks == 0) throw ConfigError("run length T must be positive");
  if (noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");
  constants.validate();
  const LaneKeepingController controller(cfg);

  std::vector<Trajectory> logs;
  logs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t seed = base_seed + i;
    // Initial conditions come from a stream separate from the sensor noise,
    // which rollout() reseeds with `seed`.
    std::mt19937_64 init_rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> offset(-constants.init_p_range,
                                                  constants.init_p_range);
    LaneWorld world;
    world.p = constants.init_p_range > 0.0 ? offset(init_rng) : 0.0;
    world.theta = 0.0;
    world.noise_sigma = noise_sigma;
    world.rng = init_rng;
    const State c0 = observe(world, constants);
    const HistoryWindow init({{c0, controller.decide(c0)}});

    ReferenceOracle oracle(std::move(world), constants);
    Trajectory log = rollout(oracle, controller, init, ticks, seed);
    log.meta.controller_x = cfg.x;
    log.meta.origin = Origin::kReal;
    logs.push_back(std::move(log));
  }
  return logs;
}

}  // namespace envi
