#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <utility>
#include <vector>

#include "envi/core/types.hpp"

namespace envi {

// Constants of the synthetic lane-keeping world. Frozen per run; persisted
// as a JSON key-value file.
struct EnvConstants {
  double steering_gain = 0.6;   // heading change per steering degree, scaled by pi/180
  double speed = 0.05;          // lane-width units per tick
  double color_gain = 100.0;    // color units per lane-width unit of offset
  double init_p_range = 0.2;    // initial offset drawn from [-range, +range]
  double noise_sigma = 0.5;     // sensor noise std, color units
  double lane_min = -0.5;
  double lane_max = 0.5;

  void validate() const;
  friend bool operator==(const EnvConstants&, const EnvConstants&) = default;
};

EnvConstants load_env_constants(const std::filesystem::path& path);
void save_env_constants(const std::filesystem::path& path, const EnvConstants& constants);

struct ControllerConfig {
  double x = 30.0;  // unit rotation degree
};

// Rule-based lane keeping: turn right above gray, left below, straight on gray.
Action controller_decide(State color, ControllerConfig cfg);

class LaneKeepingController final : public Controller {
 public:
  explicit LaneKeepingController(ControllerConfig cfg);
  Action decide(State state) const override { return controller_decide(state, cfg_); }
  double x() const { return cfg_.x; }

 private:
  ControllerConfig cfg_;
};

// Hidden physical state of the reference world.
struct LaneWorld {
  double p = 0.0;      // lateral offset from lane center, lane widths
  double theta = 0.0;  // heading, radians
  double noise_sigma = 0.0;
  std::mt19937_64 rng;
};

// Color the sensor reports for the current offset (draws one noise sample).
State observe(LaneWorld& world, const EnvConstants& constants);

// Advances the world by one tick under `last_action` and emits the sensed color.
std::pair<LaneWorld, State> oracle_step(LaneWorld world, Action last_action,
                                        const EnvConstants& constants);

// The reference world behind the TransitionOracle interface. Window length is
// one: only the most recent action matters, the rest of the state is hidden.
class ReferenceOracle final : public TransitionOracle {
 public:
  ReferenceOracle(LaneWorld world, EnvConstants constants);

  std::size_t window_length() const override { return 1; }
  bool deterministic() const override { return world_.noise_sigma == 0.0; }
  void reseed(std::uint64_t seed) override { world_.rng.seed(seed); }
  State step(const HistoryWindow& window) override;

  const LaneWorld& world() const { return world_; }

 private:
  LaneWorld world_;
  EnvConstants constants_;
};

// `count` logs of T ticks (T+1 pairs) each. Log i uses seed base_seed + i and
// an initial offset drawn uniformly from +-init_p_range; heading starts at 0.
std::vector<Trajectory> collect_fot_logs(ControllerConfig cfg, std::size_t count,
                                         std::size_t ticks, double noise_sigma,
                                         std::uint64_t base_seed,
                                         const EnvConstants& constants = {});

}  // namespace envi
