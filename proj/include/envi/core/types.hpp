#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace envi {

inline constexpr double kStateMin = 0.0;
inline constexpr double kStateMax = 100.0;
inline constexpr double kGrayColor = 50.0;
inline constexpr double kActionLimit = 90.0;
inline constexpr double kDefaultTickRate = 25.0;

// Lane color seen by the sensor, 0 (darkest) .. 100 (brightest).
struct State {
  double value = 0.0;
  friend bool operator==(State, State) = default;
};

// Steering angle in degrees, positive turns right.
struct Action {
  double value = 0.0;
  friend bool operator==(Action, Action) = default;
};

struct StateActionPair {
  State state;
  Action action;
  friend bool operator==(const StateActionPair&, const StateActionPair&) = default;
};

enum class Origin { kReal, kVirtual };

std::string_view to_string(Origin origin);
Origin parse_origin(std::string_view text);

struct TrajectoryMeta {
  double controller_x = 0.0;
  std::uint64_t seed = 0;
  Origin origin = Origin::kReal;
  // Number of oracle outputs that had to be clamped into the state range.
  std::size_t clamp_count = 0;
  friend bool operator==(const TrajectoryMeta&, const TrajectoryMeta&) = default;
};

// One closed-loop run: T+1 (state, action) pairs for a run of T ticks.
struct Trajectory {
  std::vector<StateActionPair> pairs;
  double tick_rate = kDefaultTickRate;
  TrajectoryMeta meta;

  std::size_t size() const { return pairs.size(); }
  std::vector<double> states() const;
  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

// The trailing l pairs of a trajectory; input of a learned transition
// function and the seed (sigma0) of a virtual simulation.
class HistoryWindow {
 public:
  explicit HistoryWindow(std::vector<StateActionPair> pairs);

  std::size_t length() const { return pairs_.size(); }
  std::span<const StateActionPair> pairs() const { return pairs_; }
  const StateActionPair& newest() const { return pairs_.back(); }

  // Drops the oldest pair and appends `next`.
  HistoryWindow slid(const StateActionPair& next) const;

  friend bool operator==(const HistoryWindow&, const HistoryWindow&) = default;

 private:
  std::vector<StateActionPair> pairs_;
};

// Environment transition function: maps the recent history to the next state.
class TransitionOracle {
 public:
  virtual ~TransitionOracle() = default;

  virtual std::size_t window_length() const = 0;
  virtual bool deterministic() const = 0;
  // Resets every stochastic source so a run is reproducible from `seed`.
  virtual void reseed(std::uint64_t seed) = 0;
  // May leave [0, 100]; rollout() clamps and counts such outputs.
  virtual State step(const HistoryWindow& window) = 0;
};

// CPS controller policy: a pure function from observed state to action.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual Action decide(State state) const = 0;
};

}  // namespace envi
