#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "envi/core/error.hpp"
#include "envi/core/trajectory_io.hpp"
#include "envi/harness/checksum.hpp"
#include "envi/harness/commands.hpp"
#include "envi/harness/config.hpp"
#include "envi/harness/experiment.hpp"
#include "envi/il/trained_model.hpp"
#include "envi/verify/random_baseline.hpp"
#include "support.hpp"

using namespace envi;
using namespace envi::harness;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::size_t csv_count(const fs::path& dir) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.path().extension() == ".csv";
  return n;
}

TrainingConfig quick_hyper() {
  TrainingConfig h;
  h.bc.epochs = 5;
  h.gail.epochs = 2;
  return h;
}

ExperimentPlan tiny_plan() {
  ExperimentPlan p;
  p.algorithms = {AlgorithmChoice::parse("BC"), AlgorithmChoice::parse("RANDOM")};
  p.log_counts = {3, 6};
  p.repetitions = 2;
  p.runs = 8;
  p.eval_pool_size = 8;
  p.train_pool_size = 10;
  p.bc.epochs = 5;
  p.seed = 17;
  return p;
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::string& args, const testing::TempDir& dir) {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd = std::string(ENVI_CLI_PATH) + " " + args + " >" + out.string() +
                          " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WEXITSTATUS(status), slurp(out), slurp(err)};
}

}  // namespace

TEST_CASE("sha256 known digests") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  testing::TempDir dir;
  write_file(dir / "a.txt", "abc");
  CHECK(sha256_file(dir / "a.txt") == sha256_hex("abc"));
  CHECK_THROWS_AS(sha256_file(dir / "none"), IoError);
}

TEST_CASE("checksum files") {
  testing::TempDir dir;
  CHECK(read_checksums(dir.path()).empty());
  write_file(dir / "m.json", "{}");
  ChecksumMap sums{{"m.json", sha256_file(dir / "m.json")}};
  write_checksums(dir.path(), sums);
  CHECK(read_checksums(dir.path()) == sums);
  CHECK(checksum_matches(dir.path(), sums, "m.json"));
  CHECK_FALSE(checksum_matches(dir.path(), sums, "other.json"));
  write_file(dir / "m.json", "{ }");
  CHECK_FALSE(checksum_matches(dir.path(), sums, "m.json"));
  fs::remove(dir / "m.json");
  CHECK_FALSE(checksum_matches(dir.path(), sums, "m.json"));
}

TEST_CASE("collect config parsing") {
  const auto c = collect_config_from_json(json::parse(R"({"x": 10, "count": 4, "T": 7, "seed": 9})"));
  CHECK(c.x == 10.0);
  CHECK(c.count == 4);
  CHECK(c.ticks == 7);
  CHECK(c.seed == 9);
  CHECK(c.noise_sigma == 0.5);
  CHECK_THROWS_AS(collect_config_from_json(json::parse(R"({"count": 0})")), ConfigError);
  CHECK_THROWS_AS(collect_config_from_json(json::parse(R"({"cuont": 3})")), ConfigError);
  CHECK_THROWS_AS(collect_config_from_json(json::parse(R"({"x": "ten"})")), ConfigError);
  CHECK_THROWS_AS(collect_config_from_json(json::parse(R"({"count": -2})")), ConfigError);
  CHECK_THROWS_AS(collect_config_from_json(json::parse("[1]")), ConfigError);
}

TEST_CASE("training config parsing") {
  const auto t = training_config_from_json(json::parse(
      R"({"bc": {"epochs": 7}, "gail": {"epochs": 3, "log_std_lr": 0.002, "gamma": 0.5}})"));
  CHECK(t.bc.epochs == 7);
  CHECK(t.gail.epochs == 3);
  CHECK(t.gail.log_std_lr == 0.002);
  CHECK(t.gail.gamma == 0.5);
  CHECK(t.gail.model_lr == il::GailHyper{}.model_lr);
  CHECK(gail_hyper_from_json(to_json(t.gail)).log_std_lr == 0.002);
  CHECK(bc_hyper_from_json(to_json(t.bc)).epochs == 7);
  CHECK_THROWS_AS(training_config_from_json(json::parse(R"({"ppo": {}})")), ConfigError);
  CHECK_THROWS_AS(training_config_from_json(json::parse(R"({"gail": {"log_std_lr": 0}})")),
                  ConfigError);
  CHECK_THROWS_AS(training_config_from_json(json::parse(R"({"bc": {"lr": 0.1}})")), ConfigError);
}

TEST_CASE("band and env configs") {
  const auto b = band_from_json(json::parse(R"({"band": {"center": 40, "half_width": 5}})"));
  CHECK(b.center == 40.0);
  CHECK(b.half_width == 5.0);
  CHECK(band_from_json(json::parse(R"({"half_width": 3})")).half_width == 3.0);
  CHECK_THROWS_AS(band_from_json(json::parse(R"({"half_width": -1})")), ConfigError);
  EnvConstants k;
  k.color_gain = 90.0;
  CHECK(env_from_json(to_json(k)) == k);
  CHECK_THROWS_AS(env_from_json(json::parse(R"({"gravity": 9.8})")), ConfigError);
}

TEST_CASE("algorithm choices and use cases") {
  CHECK(AlgorithmChoice::parse("RANDOM").random);
  CHECK(AlgorithmChoice::parse("BCxGAIL").trainer == il::Algorithm::kBcxGail);
  for (const char* name : {"BC", "GAIL", "BCxGAIL", "RANDOM"}) {
    CHECK(AlgorithmChoice::parse(name).name() == name);
  }
  CHECK_THROWS_AS(AlgorithmChoice::parse("PPO"), ConfigError);
  for (auto u : {UseCase::kTovk, UseCase::kTmvk, UseCase::kTmvu}) {
    CHECK(parse_use_case(to_string(u)) == u);
  }
  CHECK_THROWS_AS(parse_use_case("TOVU"), ConfigError);
}

TEST_CASE("default plans per use case") {
  const auto tovk = default_plan(UseCase::kTovk);
  CHECK(tovk.training_versions == std::vector<double>{30.0});
  CHECK(tovk.log_counts == std::vector<std::size_t>{3, 6, 9, 12, 15, 18, 21, 24, 27, 30});
  CHECK(tovk.repetitions == 30);
  CHECK(tovk.runs == 100);
  CHECK(tovk.algorithms.size() == 4);
  const auto tmvk = default_plan(UseCase::kTmvk);
  CHECK(tmvk.training_versions == std::vector<double>{10.0, 30.0, 50.0});
  CHECK(tmvk.verification_versions == tmvk.training_versions);
  const auto tmvu = default_plan(UseCase::kTmvu);
  CHECK(tmvu.verification_versions == std::vector<double>{20.0, 40.0});
  for (auto u : {UseCase::kTovk, UseCase::kTmvk, UseCase::kTmvu}) {
    CHECK_NOTHROW(default_plan(u).validate());
  }
  const auto parsed = plan_from_json(json::parse(R"({"use_case": "TMVK"})"));
  CHECK(parsed.training_versions == tmvk.training_versions);
  const auto tmvu_parsed = plan_from_json(json::parse(R"({"use_case": "TMVU"})"));
  CHECK(tmvu_parsed.verification_versions == std::vector<double>{20.0, 40.0});
}

TEST_CASE("plan invariants are enforced") {
  auto rejects = [](const char* text) {
    CHECK_THROWS_AS(plan_from_json(json::parse(text)), ConfigError);
  };
  rejects(R"({"use_case": "TMVU", "verification_versions": [30, 40]})");
  rejects(R"({"use_case": "TMVK", "training_versions": [30]})");
  rejects(R"({"use_case": "TMVK", "verification_versions": [20]})");
  rejects(R"({"use_case": "TOVK", "training_versions": [10, 30]})");
  rejects(R"({"use_case": "TOVK", "verification_versions": [10]})");
  rejects(R"({"log_counts": [0]})");
  rejects(R"({"log_counts": [31]})");
  rejects(R"({"log_counts": []})");
  rejects(R"({"algorithms": ["BC", "BC"]})");
  rejects(R"({"repetitions": 0})");
  rejects(R"({"training_versions": [0], "verification_versions": [0]})");
  rejects(R"({"history_length": 26})");
  rejects(R"({"seeds": 1})");
  rejects(R"({"use_case": "TMVK", "training_versions": [10, 10]})");
  try {
    plan_from_json(json::parse(R"({"use_case": "TMVU", "verification_versions": [30]})"));
    FAIL("accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("TMVU") != std::string::npos);
  }
}

TEST_CASE("plan JSON round trip") {
  ExperimentPlan p = default_plan(UseCase::kTmvu);
  p.log_counts = {3, 9};
  p.algorithms = {AlgorithmChoice::parse("GAIL"), AlgorithmChoice::parse("RANDOM")};
  p.seed = 123456789012345ULL;
  p.gail.log_std_lr = 0.004;
  p.band.half_width = 7.5;
  p.env.noise_sigma = 0.25;
  const auto j = to_json(p);
  const auto back = plan_from_json(json::parse(j.dump()));
  CHECK(to_json(back) == j);
  CHECK(back.seed == p.seed);
  CHECK(back.algorithms == p.algorithms);
}

TEST_CASE("read_json_file") {
  testing::TempDir dir;
  write_file(dir / "ok.json", R"({"a": 1})");
  CHECK(read_json_file(dir / "ok.json").at("a") == 1);
  write_file(dir / "bad.json", "{");
  CHECK_THROWS_AS(read_json_file(dir / "bad.json"), ConfigError);
  CHECK_THROWS_AS(read_json_file(dir / "missing.json"), IoError);
}

TEST_CASE("seed derivation") {
  CHECK(version_seed(1, 30) == version_seed(1, 30));
  CHECK(version_seed(1, 30) != version_seed(1, 10));
  CHECK(version_seed(1, 30) != version_seed(2, 30));
  CHECK(train_pool_seed(1, 30) != eval_pool_seed(1, 30));
  std::set<std::uint64_t> seen;
  for (const char* alg : {"BC", "GAIL"}) {
    for (std::size_t n : {3, 6}) {
      for (std::size_t r = 0; r < 5; ++r) seen.insert(cell_seed(9, alg, n, r));
    }
  }
  CHECK(seen.size() == 20);
}

TEST_CASE("sampling without replacement") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto s = sample_without_replacement(30, 7, seed);
    REQUIRE(s.size() == 7);
    CHECK(std::set<std::size_t>(s.begin(), s.end()).size() == 7);
    for (auto i : s) CHECK(i < 30);
    CHECK(s == sample_without_replacement(30, 7, seed));
  }
  auto all = sample_without_replacement(30, 30, 5);
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < 30; ++i) CHECK(all[i] == i);
  CHECK(sample_without_replacement(30, 0, 1).empty());
  CHECK_THROWS_AS(sample_without_replacement(3, 4, 1), ConfigError);
  // every index is reachable and roughly uniform as the first draw
  std::vector<int> hits(10, 0);
  for (std::uint64_t seed = 0; seed < 5000; ++seed) ++hits[sample_without_replacement(10, 1, seed)[0]];
  for (int h : hits) CHECK(std::abs(h - 500) < 100);
}

TEST_CASE("plan fingerprint ignores cell layout fields") {
  const ExperimentPlan base = tiny_plan();
  ExperimentPlan p = base;
  p.repetitions = 9;
  p.log_counts = {3};
  p.algorithms = {AlgorithmChoice::parse("GAIL")};
  CHECK(plan_fingerprint(p) == plan_fingerprint(base));
  p = base;
  p.seed = 18;
  CHECK(plan_fingerprint(p) != plan_fingerprint(base));
  p = base;
  p.bc.epochs = 6;
  CHECK(plan_fingerprint(p) != plan_fingerprint(base));
  p = base;
  p.runs = 9;
  CHECK(plan_fingerprint(p) != plan_fingerprint(base));
}

TEST_CASE("cmd_collect writes logs and a manifest") {
  testing::TempDir dir;
  CollectConfig cfg;
  cfg.count = 30;
  cfg.seed = 4;
  const auto files = cmd_collect(cfg, dir / "a");
  REQUIRE(files.size() == 30);
  CHECK(files.front().filename() == "log_000.csv");
  for (const auto& f : files) {
    const auto t = read_trajectory(f);
    CHECK(t.size() == 26);
    CHECK(t.meta.controller_x == 30.0);
  }
  const auto manifest = json::parse(slurp(dir / "a" / "manifest.json"));
  CHECK(manifest.at("count") == 30);
  CHECK(manifest.at("T") == 25);
  REQUIRE(manifest.at("files").size() == 30);
  CHECK(manifest.at("files")[3].at("sha256") == sha256_file(files[3]));

  cmd_collect(cfg, dir / "b");
  for (const auto& f : files) CHECK(slurp(f) == slurp(dir / "b" / f.filename()));
  CHECK(slurp(dir / "a" / "manifest.json") == slurp(dir / "b" / "manifest.json"));

  cfg.count = 0;
  CHECK_THROWS_AS(cmd_collect(cfg, dir / "c"), ConfigError);
  cfg.count = 1;
  write_file(dir / "file", "x");
  CHECK_THROWS_AS(cmd_collect(cfg, dir / "file" / "sub"), IoError);
}

TEST_CASE("read_logs expands directories") {
  testing::TempDir dir;
  CollectConfig cfg;
  cfg.count = 3;
  cmd_collect(cfg, dir / "logs");
  const std::vector<fs::path> one{dir / "logs"};
  CHECK(read_logs(one).size() == 3);
  const std::vector<fs::path> mixed{dir / "logs", dir / "logs" / "log_001.csv"};
  CHECK(read_logs(mixed).size() == 4);
  fs::create_directories(dir / "empty");
  const std::vector<fs::path> empty{dir / "empty"};
  CHECK_THROWS_AS(read_logs(empty), IoError);
}

TEST_CASE("controller table") {
  auto logs = collect_fot_logs({10}, 1, 5, 0.5, 0);
  const auto more = collect_fot_logs({50}, 2, 5, 0.5, 0);
  logs.insert(logs.end(), more.begin(), more.end());
  const ControllerTable table(logs);
  CHECK(table.at(50).decide(State{70}).value == 50.0);
  CHECK(table.lookup()(10).decide(State{20}).value == -10.0);
  CHECK_THROWS_AS(table.at(30), ConfigError);
}

TEST_CASE("simulate_runs cycles sources and seeds") {
  const auto sources = collect_fot_logs({30}, 3, 25, 0.5, 1);
  const LaneKeepingController ctl({30});
  verify::RandomBaseline oracle(10);
  const auto runs = simulate_runs(oracle, ctl, sources, 7, 25, 99);
  REQUIRE(runs.size() == 7);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    CHECK(runs[i].size() == 26);
    CHECK(runs[i].meta.origin == Origin::kVirtual);
    CHECK(runs[i].meta.controller_x == 30.0);
    const auto& src = sources[i % 3];
    for (std::size_t k = 0; k < 10; ++k) CHECK(runs[i].pairs[k] == src.pairs[k]);
  }
  CHECK(simulate_runs(oracle, ctl, sources, 7, 25, 99) == runs);
  CHECK_FALSE(simulate_runs(oracle, ctl, sources, 7, 25, 100) == runs);

  const std::vector<Trajectory> none;
  CHECK_THROWS_AS(simulate_runs(oracle, ctl, none, 1, 25, 0), ConfigError);
  CHECK_THROWS_AS(simulate_runs(oracle, ctl, sources, 0, 25, 0), ConfigError);
  const auto short_logs = collect_fot_logs({30}, 1, 4, 0.5, 1);
  CHECK_THROWS_AS(simulate_runs(oracle, ctl, short_logs, 1, 25, 0), ConfigError);
}

TEST_CASE("train, simulate and verify end to end") {
  testing::TempDir dir;
  CollectConfig cfg;
  cfg.count = 4;
  cmd_collect(cfg, dir / "logs");
  cfg.count = 6;
  cfg.seed = 1000;
  cmd_collect(cfg, dir / "eval");

  TrainOptions opt;
  opt.algorithm = il::Algorithm::kBc;
  opt.logs = {dir / "logs"};
  opt.hyper = quick_hyper();
  opt.seed = 3;
  opt.out_dir = dir / "bc";
  const auto model = cmd_train(opt);
  CHECK(model.history_length == 10);
  CHECK(il::load_model(dir / "bc" / "model.json").head.mean.architecture().input_dim == 20);
  CHECK(fs::exists(dir / "bc" / "trace.csv"));
  CHECK(model.provenance.source_logs.size() == 4);

  SimulateOptions sim;
  sim.model = dir / "bc" / "model.json";
  sim.sigma0_dir = dir / "eval";
  sim.runs = 6;
  sim.out_dir = dir / "virt";
  const auto files = cmd_simulate(sim);
  CHECK(files.size() == 6);
  CHECK(read_trajectory(files[0]).meta.origin == Origin::kVirtual);
  const auto first = slurp(files[0]);
  sim.out_dir = dir / "virt2";
  cmd_simulate(sim);
  CHECK(slurp(dir / "virt2" / "run_000.csv") == first);

  const auto same = cmd_verify(dir / "eval", dir / "eval", {}, dir / "self");
  CHECK(same.acc == 1.0);
  const auto rep = cmd_verify(dir / "eval", dir / "virt", {}, dir / "report");
  CHECK(rep.acc >= 0.0);
  CHECK(rep.acc <= 1.0);
  CHECK(fs::exists(dir / "report" / "report.csv"));

  sim.model.clear();
  sim.random = true;
  sim.out_dir = dir / "rand";
  CHECK(cmd_simulate(sim).size() == 6);

  // a 5-pair source cannot seed a 10-step window
  CollectConfig short_cfg;
  short_cfg.count = 2;
  short_cfg.ticks = 4;
  cmd_collect(short_cfg, dir / "short");
  sim.random = false;
  sim.model = dir / "bc" / "model.json";
  sim.sigma0_dir = dir / "short";
  sim.out_dir = dir / "never";
  CHECK_THROWS_AS(cmd_simulate(sim), ConfigError);

  fs::create_directories(dir / "empty");
  CHECK_THROWS(cmd_verify(dir / "eval", dir / "empty", {}, dir / "r2"));
  CHECK_THROWS(cmd_verify(dir / "eval", dir / "short", {}, dir / "r3"));
}

TEST_CASE("deterministic GAIL simulation is reproducible") {
  testing::TempDir dir;
  CollectConfig cfg;
  cfg.count = 2;
  cmd_collect(cfg, dir / "logs");
  TrainOptions opt;
  opt.algorithm = il::Algorithm::kGail;
  opt.logs = {dir / "logs"};
  opt.hyper = quick_hyper();
  opt.out_dir = dir / "gail";
  const auto model = cmd_train(opt);
  CHECK(model.stochastic);
  SimulateOptions sim;
  sim.model = dir / "gail" / "model.json";
  sim.sigma0_dir = dir / "logs";
  sim.runs = 1;
  sim.deterministic = true;
  sim.out_dir = dir / "a";
  cmd_simulate(sim);
  sim.seed = 5;
  sim.out_dir = dir / "b";
  cmd_simulate(sim);
  CHECK(slurp(dir / "a" / "run_000.csv") == slurp(dir / "b" / "run_000.csv"));
}

TEST_CASE("cmd_train failures leave no outputs") {
  testing::TempDir dir;
  TrainOptions opt;
  opt.logs = {dir / "nothing"};
  opt.out_dir = dir / "out";
  CHECK_THROWS(cmd_train(opt));
  CHECK_FALSE(fs::exists(dir / "out" / "model.json"));

  CollectConfig cfg;
  cfg.count = 2;
  cfg.ticks = 5;
  cmd_collect(cfg, dir / "short");
  opt.logs = {dir / "short"};
  CHECK_THROWS_AS(cmd_train(opt), ConfigError);
  CHECK_FALSE(fs::exists(dir / "out" / "model.json"));
  CHECK_FALSE(fs::exists(dir / "out" / "trace.csv"));
}

TEST_CASE("summary CSV round trip") {
  testing::TempDir dir;
  const std::vector<ResultRow> rows{{"BC", 3, 30.0, 0.912345678, 0.01, 5},
                                    {"RANDOM", 30, 12.5, 0.5, 0.0, 5}};
  write_summary_csv(dir / "s.csv", rows);
  CHECK(slurp(dir / "s.csv") ==
        "algorithm,log_count,x,acc_mean,acc_std\n"
        "BC,3,30.0000,0.912346,0.010000\n"
        "RANDOM,30,12.5000,0.500000,0.000000\n");
  const auto back = read_summary_csv(dir / "s.csv");
  REQUIRE(back.size() == 2);
  CHECK(back[0].algorithm == "BC");
  CHECK(back[0].acc_mean == doctest::Approx(0.912346));
  CHECK(back[1].x == 12.5);
  write_file(dir / "bad.csv", "a,b\n");
  CHECK_THROWS_AS(read_summary_csv(dir / "bad.csv"), IoError);
}

TEST_CASE("experiment cell accounting, reuse and reproducibility") {
  testing::TempDir dir;
  const ExperimentPlan plan = tiny_plan();
  std::ostringstream log;
  const auto first = run_experiment(plan, dir / "run", 2, &log);
  CHECK(first.cells == 8);
  CHECK(first.trainings_run == 4);
  CHECK(first.trainings_reused == 0);
  CHECK(first.evaluations_run == 8);
  CHECK(first.summary == dir / "run" / "summary_TOVK.csv");
  REQUIRE(first.rows.size() == 4);
  for (const auto& r : first.rows) {
    CHECK(r.acc_mean >= 0.0);
    CHECK(r.acc_mean <= 1.0);
    CHECK(r.repetitions == 2);
  }
  CHECK(first.rows[0].algorithm == "BC");
  CHECK(first.rows[3].algorithm == "RANDOM");
  CHECK(first.rows[3].log_count == 6);
  const std::string summary = slurp(first.summary);
  CHECK(log.str().find("cell BC_n3_r0 done") != std::string::npos);

  // rerun: everything is reused and the summary does not change
  const auto again = run_experiment(plan, dir / "run", 1);
  CHECK(again.trainings_run == 0);
  CHECK(again.trainings_reused == 4);
  CHECK(again.evaluations_reused == 8);
  CHECK(slurp(again.summary) == summary);

  // a corrupted artifact is detected and only that cell is redone
  const auto cell_dir = dir / "run" / "cells" / plan_fingerprint(plan) / "BC_n6_r1";
  write_file(cell_dir / "model.json", "{}");
  const auto repaired = run_experiment(plan, dir / "run", 1);
  CHECK(repaired.trainings_run == 1);
  CHECK(repaired.trainings_reused == 3);
  CHECK(slurp(repaired.summary) == summary);

  // a fresh directory with a different worker count gives identical bytes
  const auto fresh = run_experiment(plan, dir / "fresh", 1);
  CHECK(fresh.trainings_run == 4);
  CHECK(slurp(fresh.summary) == summary);

  ExperimentPlan bad = plan;
  bad.repetitions = 0;
  CHECK_THROWS_AS(run_experiment(bad, dir / "bad", 1), ConfigError);
  CHECK_THROWS_AS(run_experiment(plan, dir / "bad", 0), ConfigError);
}

TEST_CASE("experiment cell accounting for the TOVK BC/RANDOM plan") {
  testing::TempDir dir;
  ExperimentPlan plan;
  plan.algorithms = {AlgorithmChoice::parse("BC"), AlgorithmChoice::parse("RANDOM")};
  plan.log_counts = {3, 30};
  plan.repetitions = 5;
  plan.runs = 4;
  plan.eval_pool_size = 4;
  plan.bc.epochs = 1;
  const auto out = run_experiment(plan, dir.path(), 2);
  CHECK(out.cells == 20);
  CHECK(out.trainings_run == 10);
  CHECK(out.evaluations_run == 20);
  CHECK(out.rows.size() == 4);
  CHECK(read_summary_csv(out.summary).size() == 4);
}

TEST_CASE("experiment over several versions") {
  testing::TempDir dir;
  ExperimentPlan plan = default_plan(UseCase::kTmvu);
  plan.algorithms = {AlgorithmChoice::parse("BC")};
  plan.log_counts = {1};
  plan.repetitions = 1;
  plan.runs = 3;
  plan.eval_pool_size = 3;
  plan.bc.epochs = 1;
  const auto out = run_experiment(plan, dir.path(), 1);
  CHECK(out.summary.filename() == "summary_TMVU.csv");
  REQUIRE(out.rows.size() == 2);
  CHECK(out.rows[0].x == 20.0);
  CHECK(out.rows[1].x == 40.0);
  const auto model =
      il::load_model(dir / "cells" / plan_fingerprint(plan) / "BC_n1_r0" / "model.json");
  // one log from each of the three training pools
  CHECK(model.provenance.source_logs.size() == 3);
}

TEST_CASE("command-line interface") {
  testing::TempDir dir;
  write_file(dir / "collect.json", R"({"x": 30, "count": 3, "T": 25, "seed": 2})");
  auto r = run_cli("collect --config " + (dir / "collect.json").string() + " --out " +
                       (dir / "logs").string(),
                   dir);
  CHECK(r.code == 0);
  CHECK(csv_count(dir / "logs") == 3);

  r = run_cli("train --algorithm PPO --logs " + (dir / "logs").string() + " --out " +
                  (dir / "m").string(),
              dir);
  CHECK(r.code == 2);
  CHECK(r.err.rfind("error=usage message=\"", 0) == 0);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);

  write_file(dir / "hyper.json", R"({"bc": {"epochs": 3}})");
  r = run_cli("train --algorithm BC --config " + (dir / "hyper.json").string() + " --logs " +
                  (dir / "logs").string() + " --out " + (dir / "m").string(),
              dir);
  CHECK(r.code == 0);
  CHECK(r.out.find("input dimension 20") != std::string::npos);

  r = run_cli("simulate --model " + (dir / "m" / "model.json").string() + " --x 30 --runs 3 --sigma0 " +
                  (dir / "logs").string() + " --out " + (dir / "virt").string(),
              dir);
  CHECK(r.code == 0);
  CHECK(csv_count(dir / "virt") == 3);

  r = run_cli("verify --real " + (dir / "logs").string() + " --virtual " + (dir / "logs").string() +
                  " --out " + (dir / "rep").string(),
              dir);
  CHECK(r.code == 0);
  CHECK(r.out == "acc=1.00000\n");

  write_file(dir / "bad.json", R"({"count": 0})");
  r = run_cli("collect --config " + (dir / "bad.json").string() + " --out " + (dir / "x").string(),
              dir);
  CHECK(r.code == 3);
  CHECK(r.err.rfind("error=config ", 0) == 0);

  r = run_cli("collect --config " + (dir / "missing.json").string() + " --out " +
                  (dir / "x").string(),
              dir);
  CHECK(r.code == 4);

  write_file(dir / "plan.json", R"({"use_case": "TMVU", "verification_versions": [10]})");
  r = run_cli("experiment --config " + (dir / "plan.json").string() + " --out " +
                  (dir / "e").string(),
              dir);
  CHECK(r.code == 3);
  CHECK(r.err.find("TMVU") != std::string::npos);

  r = run_cli("frobnicate", dir);
  CHECK(r.code == 2);
  r = run_cli("simulate --x 30 --sigma0 " + (dir / "logs").string() + " --out " + (dir / "v2").string(),
              dir);
  CHECK(r.code == 2);
}
