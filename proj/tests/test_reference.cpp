#include <doctest.h>

#include <cmath>
#include <fstream>

#include "envi/core/error.hpp"
#include "envi/reference/lane_world.hpp"
#include "support.hpp"

using namespace envi;

TEST_CASE("controller truth table") {
  CHECK(controller_decide(State{70}, {30}).value == 30);
  CHECK(controller_decide(State{50}, {10}).value == 0);
  CHECK(controller_decide(State{20}, {10}).value == -10);
  for (int c = 0; c <= 100; ++c) {
    for (double x : {10.0, 20.0, 30.0, 40.0, 50.0}) {
      const double expect = c > 50 ? x : (c < 50 ? -x : 0.0);
      CHECK(controller_decide(State{double(c)}, {x}).value == expect);
    }
  }
  CHECK(controller_decide(State{50.0000001}, {10}).value == 10);
  CHECK(controller_decide(State{49.9999999}, {10}).value == -10);
  CHECK_THROWS_AS(LaneKeepingController({0.0}), ConfigError);
}

TEST_CASE("oracle_step examples") {
  const EnvConstants k;
  LaneWorld w;
  auto [w1, c1] = oracle_step(w, Action{0}, k);
  CHECK(w1.p == 0.0);
  CHECK(c1.value == 50.0);

  w.p = 0.1;
  auto [w2, c2] = oracle_step(w, Action{0}, k);
  CHECK(w2.theta == 0.0);
  CHECK(w2.p == doctest::Approx(0.1));
  CHECK(c2.value == doctest::Approx(60.0));

  w.p = 0.0;
  auto [w3, c3] = oracle_step(w, Action{30}, k);
  const double theta = -0.6 * 30.0 * 3.14159265358979323846 / 180.0;
  CHECK(w3.theta == doctest::Approx(theta));
  CHECK(w3.theta == doctest::Approx(-0.3142).epsilon(1e-4));
  CHECK(w3.p == doctest::Approx(0.05 * std::sin(theta)));
  CHECK(w3.p == doctest::Approx(-0.01546).epsilon(1e-3));
  CHECK(c3.value == doctest::Approx(48.45).epsilon(1e-3));
}

TEST_CASE("oracle_step clamps offset and color") {
  const EnvConstants k;
  LaneWorld w;
  w.p = 0.49;
  w.theta = 1.5;
  for (int i = 0; i < 5; ++i) {
    auto [next, c] = oracle_step(w, Action{0}, k);
    CHECK(next.p <= 0.5);
    CHECK(c.value <= 100.0);
    w = next;
  }
  CHECK(w.p == 0.5);
  w.noise_sigma = 30.0;
  w.rng.seed(1);
  for (int i = 0; i < 200; ++i) {
    auto [next, c] = oracle_step(w, Action{0}, k);
    CHECK(c.value >= 0.0);
    CHECK(c.value <= 100.0);
    w = next;
  }
}

TEST_CASE("positive action steers toward the dark side") {
  const EnvConstants k;
  LaneWorld w;
  w.p = 0.2;
  const LaneKeepingController ctl({30});
  State c{70};
  double max_p = 0.0;
  // a bang-bang loop stays inside the lane and crosses the center
  bool crossed = false;
  for (int t = 0; t < 200; ++t) {
    auto [next, color] = oracle_step(w, ctl.decide(c), k);
    w = next;
    c = color;
    max_p = std::max(max_p, std::abs(w.p));
    crossed |= w.p < 0.0;
  }
  CHECK(crossed);
  CHECK(max_p < 0.5);
}

TEST_CASE("reference oracle ignores all but the newest action") {
  LaneWorld w;
  w.p = 0.05;
  ReferenceOracle a(w, EnvConstants{});
  ReferenceOracle b(w, EnvConstants{});
  HistoryWindow wa({{State{0}, Action{-90}}, {State{70}, Action{20}}});
  HistoryWindow wb({{State{100}, Action{90}}, {State{10}, Action{20}}});
  CHECK(a.step(wa) == b.step(wb));
  CHECK(a.window_length() == 1);
  CHECK(a.deterministic());
}

TEST_CASE("collect_fot_logs") {
  const auto logs = collect_fot_logs({30}, 5, 25, 0.5, 100);
  REQUIRE(logs.size() == 5);
  for (std::size_t i = 0; i < logs.size(); ++i) {
    CHECK(logs[i].size() == 26);
    CHECK(logs[i].meta.seed == 100 + i);
    CHECK(logs[i].meta.controller_x == 30);
    CHECK(logs[i].meta.origin == Origin::kReal);
    for (const auto& p : logs[i].pairs) {
      CHECK(p.action.value == controller_decide(p.state, {30}).value);
    }
  }
  // a log depends only on its own seed
  const auto again = collect_fot_logs({30}, 2, 25, 0.5, 103);
  CHECK(again[0] == logs[3]);
  CHECK(again[1] == logs[4]);
  CHECK_FALSE(logs[0] == logs[1]);

  // initial offset drawn within +-0.2 shows up as the first color without noise
  for (const auto& log : collect_fot_logs({30}, 50, 5, 0.0, 0)) {
    CHECK(std::abs(log.pairs[0].state.value - 50.0) <= 20.0);
  }
  CHECK_THROWS_AS(collect_fot_logs({30}, 0, 25, 0.5, 0), ConfigError);
  CHECK_THROWS_AS(collect_fot_logs({30}, 1, 0, 0.5, 0), ConfigError);
  CHECK_THROWS_AS(collect_fot_logs({30}, 1, 5, -1.0, 0), ConfigError);
}

TEST_CASE("environment constants file") {
  testing::TempDir dir;
  EnvConstants k;
  k.steering_gain = 0.7;
  k.noise_sigma = 1.25;
  k.lane_min = -0.4;
  k.lane_max = 0.6;
  save_env_constants(dir / "env.json", k);
  CHECK(load_env_constants(dir / "env.json") == k);

  std::ofstream(dir / "partial.json") << R"({"v": 0.1})";
  EnvConstants expect;
  expect.speed = 0.1;
  CHECK(load_env_constants(dir / "partial.json") == expect);

  std::ofstream(dir / "bad.json") << R"({"lane_bounds": [0.5, -0.5]})";
  CHECK_THROWS_AS(load_env_constants(dir / "bad.json"), ConfigError);
  std::ofstream(dir / "junk.json") << "{";
  CHECK_THROWS_AS(load_env_constants(dir / "junk.json"), ConfigError);
  CHECK_THROWS_AS(load_env_constants(dir / "none.json"), IoError);
}
