#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <vector>

#include "envi/core/dataset.hpp"
#include "envi/core/error.hpp"
#include "envi/core/normalization.hpp"
#include "envi/core/rollout.hpp"
#include "envi/core/seeds.hpp"
#include "envi/core/trajectory_io.hpp"
#include "envi/reference/lane_world.hpp"
#include "support.hpp"

using namespace envi;

namespace {

class ConstantOracle final : public TransitionOracle {
 public:
  ConstantOracle(std::size_t l, double value) : l_(l), value_(value) {}
  std::size_t window_length() const override { return l_; }
  bool deterministic() const override { return true; }
  void reseed(std::uint64_t) override {}
  State step(const HistoryWindow& window) override {
    seen.emplace_back(window.pairs().begin(), window.pairs().end());
    return State{value_};
  }
  std::vector<std::vector<StateActionPair>> seen;

 private:
  std::size_t l_;
  double value_;
};

// Emits the newest state plus a fixed increment, so trajectories drift out of range.
class DriftOracle final : public TransitionOracle {
 public:
  explicit DriftOracle(double inc) : inc_(inc) {}
  std::size_t window_length() const override { return 2; }
  bool deterministic() const override { return false; }
  void reseed(std::uint64_t seed) override { rng_.seed(seed); }
  State step(const HistoryWindow& w) override {
    std::normal_distribution<double> n(0.0, 1.0);
    return State{w.newest().state.value + inc_ + n(rng_)};
  }

 private:
  double inc_;
  std::mt19937_64 rng_;
};

HistoryWindow flat_window(std::size_t l, double s, double a) {
  return HistoryWindow(std::vector<StateActionPair>(l, {State{s}, Action{a}}));
}

}  // namespace

TEST_CASE("normalization maps the ranges onto [-1, 1]") {
  const NormSpec norm;
  CHECK(normalize(0.0, norm.state) == -1.0);
  CHECK(normalize(50.0, norm.state) == 0.0);
  CHECK(normalize(100.0, norm.state) == 1.0);
  CHECK(normalize(-90.0, norm.action) == -1.0);
  CHECK(normalize(45.0, norm.action) == doctest::Approx(0.5));
  // clamped before mapping
  CHECK(normalize(130.0, norm.state) == 1.0);
  CHECK(normalize(-5.0, norm.state) == -1.0);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int i = 0; i < 200; ++i) {
    const double v = u(rng);
    CHECK(denormalize(normalize(v, norm.state), norm.state) == doctest::Approx(v).epsilon(1e-12));
  }
}

TEST_CASE("NormSpec rejects empty ranges") {
  NormSpec bad;
  bad.state = {10.0, 10.0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  NormSpec{}.validate();
}

TEST_CASE("window features interleave states and actions") {
  HistoryWindow w({{State{0.0}, Action{90.0}}, {State{75.0}, Action{-45.0}}});
  std::vector<float> out(4);
  window_features<float>(w, NormSpec{}, out);
  CHECK(out[0] == -1.0f);
  CHECK(out[1] == 1.0f);
  CHECK(out[2] == doctest::Approx(0.5));
  CHECK(out[3] == doctest::Approx(-0.5));
  std::vector<double> wrong(3);
  CHECK_THROWS_AS(window_features<double>(w, NormSpec{}, wrong), ConfigError);
}

TEST_CASE("history window slides") {
  CHECK_THROWS_AS(HistoryWindow({}), ConfigError);
  HistoryWindow w({{State{1}, Action{1}}, {State{2}, Action{2}}, {State{3}, Action{3}}});
  const auto s = w.slid({State{4}, Action{4}});
  REQUIRE(s.length() == 3);
  CHECK(s.pairs()[0].state.value == 2);
  CHECK(s.newest().state.value == 4);
  CHECK(w.newest().state.value == 3);
}

TEST_CASE("rollout on the gray fixed point") {
  ConstantOracle oracle(10, 50.0);
  LaneKeepingController c({30});
  const auto t = rollout(oracle, c, flat_window(10, 50.0, 0.0), 5, 1);
  REQUIRE(t.size() == 15);
  for (std::size_t i = 10; i < 15; ++i) {
    CHECK(t.pairs[i].state.value == 50.0);
    CHECK(t.pairs[i].action.value == 0.0);
  }
  CHECK(t.meta.seed == 1);
  CHECK(t.meta.clamp_count == 0);
}

TEST_CASE("rollout against the reference world at rest") {
  LaneWorld world;
  ReferenceOracle oracle(world, EnvConstants{});
  LaneKeepingController c({30});
  const auto t = rollout(oracle, c, flat_window(1, 50.0, 0.0), 1, 0);
  REQUIRE(t.size() == 2);
  CHECK(t.pairs[1] == StateActionPair{State{50.0}, Action{0.0}});
}

TEST_CASE("rollout preconditions") {
  ConstantOracle oracle(3, 50.0);
  LaneKeepingController c({30});
  CHECK_THROWS_AS(rollout(oracle, c, flat_window(3, 50, 0), 0, 0), ConfigError);
  CHECK_THROWS_AS(rollout(oracle, c, flat_window(4, 50, 0), 2, 0), ConfigError);
}

TEST_CASE("rollout window equals the trailing pairs") {
  ConstantOracle oracle(4, 80.0);
  LaneKeepingController c({20});
  HistoryWindow init({{State{10}, Action{-20}}, {State{30}, Action{-20}},
                      {State{60}, Action{20}}, {State{70}, Action{20}}});
  const auto t = rollout(oracle, c, init, 6, 0);
  REQUIRE(oracle.seen.size() == 6);
  for (std::size_t k = 0; k < 6; ++k) {
    const std::vector<StateActionPair> expect(t.pairs.begin() + k, t.pairs.begin() + k + 4);
    CHECK(oracle.seen[k] == expect);
  }
}

TEST_CASE("rollout clamps and counts out-of-range outputs") {
  DriftOracle oracle(20.0);
  LaneKeepingController c({30});
  const auto t = rollout(oracle, c, flat_window(2, 60.0, 30.0), 10, 3);
  for (const auto& p : t.pairs) {
    CHECK(p.state.value >= 0.0);
    CHECK(p.state.value <= 100.0);
  }
  CHECK(t.meta.clamp_count >= 7);
  CHECK(t.pairs.back().state.value == 100.0);
  CHECK(t.pairs.back().action.value == 30.0);
}

TEST_CASE("rollout is deterministic per seed") {
  DriftOracle a(0.0), b(0.0);
  LaneKeepingController c({30});
  const auto init = flat_window(2, 50.0, 0.0);
  const auto t1 = rollout(a, c, init, 30, 42);
  const auto t2 = rollout(b, c, init, 30, 42);
  const auto t3 = rollout(a, c, init, 30, 43);
  CHECK(t1 == t2);
  CHECK_FALSE(t1 == t3);
}

TEST_CASE("extract_sigma0") {
  const auto log = testing::make_trajectory({10, 20, 30, 40, 50});
  const auto w = extract_sigma0(log, 3);
  CHECK(w.length() == 3);
  CHECK(w.newest().state.value == 30);
  CHECK_THROWS_AS(extract_sigma0(log, 6), ConfigError);
  CHECK_THROWS_AS(extract_sigma0(log, 0), ConfigError);
}

TEST_CASE("dataset count and windows match brute-force enumeration") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> len(4, 40);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t l = 1 + trial % 5;
    std::vector<Trajectory> logs;
    std::size_t expected = 0;
    for (int i = 0; i < 4; ++i) {
      logs.push_back(testing::random_trajectory(rng, len(rng)));
      if (logs.back().size() > l) expected += logs.back().size() - l;
    }
    const NormSpec norm;
    const auto data = make_dataset(logs, l, norm);
    REQUIRE(data.samples.size() == expected);

    std::size_t k = 0;
    for (std::size_t i = 0; i < logs.size(); ++i) {
      const auto& p = logs[i].pairs;
      for (std::size_t j = 0; j + l < p.size(); ++j, ++k) {
        const auto& s = data.samples[k];
        CHECK(s.source_log == i);
        CHECK(s.offset == j);
        REQUIRE(s.input.size() == 2 * l);
        for (std::size_t m = 0; m < l; ++m) {
          CHECK(s.input[2 * m] == doctest::Approx((p[j + m].state.value - 50.0) / 50.0));
          CHECK(s.input[2 * m + 1] == doctest::Approx(p[j + m].action.value / 90.0));
        }
        CHECK(s.target == doctest::Approx((p[j + l].state.value - 50.0) / 50.0));
      }
    }
  }
}

TEST_CASE("dataset skips short logs and groups by log") {
  std::mt19937_64 rng(3);
  std::vector<Trajectory> logs{testing::random_trajectory(rng, 12),
                               testing::random_trajectory(rng, 10),
                               testing::random_trajectory(rng, 11)};
  logs[0].meta.controller_x = 30;
  logs[2].meta.controller_x = 50;
  const std::vector<std::size_t> ids{7, 8, 9};
  const auto data = make_dataset(logs, 10, NormSpec{}, ids);
  CHECK(data.samples.size() == 3);
  CHECK(data.warnings.size() == 1);
  const auto groups = data.groups();
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].source_log == 7);
  CHECK(groups[0].samples.size() == 2);
  CHECK(groups[0].controller_x == 30);
  CHECK(groups[1].source_log == 9);
  CHECK(groups[1].controller_x == 50);

  CHECK_THROWS_AS(make_dataset(std::span(logs).subspan(1, 1), 10, NormSpec{}), ConfigError);
  CHECK_THROWS_AS(make_dataset(logs, 0, NormSpec{}), ConfigError);
}

TEST_CASE("trajectory files round-trip exactly") {
  testing::TempDir dir;
  std::mt19937_64 rng(5);
  auto t = testing::random_trajectory(rng, 26);
  t.meta.controller_x = 30;
  t.meta.seed = 123456789012345ULL;
  t.meta.origin = Origin::kVirtual;
  t.meta.clamp_count = 4;
  write_trajectory(dir / "a.csv", t);
  CHECK(std::filesystem::exists(dir / "a.meta.json"));
  CHECK(read_trajectory(dir / "a.csv") == t);

  write_trajectory(dir / "b.csv", testing::make_trajectory({50, 60}));
  const auto files = list_trajectory_files(dir.path());
  REQUIRE(files.size() == 2);
  CHECK(files[0].filename() == "a.csv");
  CHECK(read_trajectory_dir(dir.path()).size() == 2);
}

TEST_CASE("malformed trajectory files are rejected") {
  testing::TempDir dir;
  const auto write = [&](const std::string& text) {
    std::ofstream(dir / "x.csv") << text;
    return dir / "x.csv";
  };
  CHECK_THROWS_AS(read_trajectory(write("t,s,a\n0,1,2\n")), ConfigError);
  CHECK_THROWS_AS(read_trajectory(write("tick,state,action\n0,1\n")), ConfigError);
  CHECK_THROWS_AS(read_trajectory(write("tick,state,action\n1,1,2\n")), ConfigError);
  CHECK_THROWS_AS(read_trajectory(write("tick,state,action\n0,abc,2\n")), ConfigError);
  CHECK_THROWS_AS(read_trajectory(dir / "missing.csv"), IoError);
}

TEST_CASE("decimal formatting round-trips") {
  CHECK(format_decimal(50.0) == "50.0000");
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 0; i < 500; ++i) {
    const double v = u(rng);
    CHECK(parse_decimal(format_decimal(v)) == v);
  }
}

TEST_CASE("derive_seed") {
  // fnv1a64("a") cancels the parent, leaving the first splitmix64 output of state 0.
  CHECK(derive_seed(0xaf63dc4c8601ec8cULL, "a") == 0xe220a8397b1dcdafULL);
  CHECK(derive_seed(1, "x") != derive_seed(2, "x"));
  CHECK(derive_seed(1, "x") != derive_seed(1, "y"));
  CHECK(derive_seed(1, std::uint64_t{0}) != derive_seed(1, std::uint64_t{1}));
  CHECK(derive_seed(5, std::uint64_t{3}) == derive_seed(5, std::uint64_t{3}));
}
