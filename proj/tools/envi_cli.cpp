// envi: collect reference logs, train environment models, simulate, verify
// and run whole experiments.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "envi/core/error.hpp"
#include "envi/core/trajectory_io.hpp"
#include "envi/harness/commands.hpp"
#include "envi/harness/config.hpp"
#include "envi/harness/experiment.hpp"

namespace fs = std::filesystem;
using namespace envi;
using namespace envi::harness;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum ExitCode { kOk = 0, kInternal = 1, kUsage = 2, kConfig = 3, kIo = 4, kNumerical = 5 };

int report(const char* category, const std::string& what, int code) {
  std::string message = what;
  for (char& c : message) {
    if (c == '\n' || c == '\r') c = ' ';
    if (c == '"') c = '\'';
  }
  std::cerr << "error=" << category << " message=\"" << message << "\"\n";
  return code;
}

il::Algorithm parse_algorithm_arg(const std::string& name) {
  try {
    return il::parse_algorithm(name);
  } catch (const ConfigError&) {
    throw UsageError("unknown algorithm '" + name + "' (expected BC, GAIL or BCxGAIL)");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Environment model generation and simulation-based verification"};
  app.require_subcommand(1);

  // collect
  auto* collect = app.add_subcommand("collect", "Collect logs from the reference world");
  fs::path collect_config, collect_out;
  std::optional<std::uint64_t> collect_seed;
  collect->add_option("--config", collect_config, "Collect config (JSON)")->required();
  collect->add_option("--seed", collect_seed, "Override the config seed");
  collect->add_option("--out", collect_out, "Output directory")->required();

  // train
  auto* train = app.add_subcommand("train", "Train an environment model");
  std::string algorithm;
  std::vector<fs::path> train_logs;
  std::size_t history = 10;
  std::optional<fs::path> train_config;
  std::uint64_t train_seed = 0;
  fs::path train_out;
  train->add_option("--algorithm", algorithm, "BC, GAIL or BCxGAIL")->required();
  train->add_option("--logs", train_logs, "Log files or directories")->required();
  train->add_option("--history", history, "History length l");
  train->add_option("--config", train_config, "Training hyperparameters (JSON)");
  train->add_option("--seed", train_seed, "Training seed");
  train->add_option("--out", train_out, "Output directory")->required();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Simulate a model in closed loop");
  SimulateOptions sim;
  simulate->add_option("--model", sim.model, "Model file");
  simulate->add_flag("--random", sim.random, "Use the random baseline instead of a model");
  simulate->add_option("--history", sim.history_length, "Random baseline window length");
  simulate->add_option("--x", sim.x, "Controller unit rotation degree")->required();
  simulate->add_option("--sigma0", sim.sigma0_dir, "Directory of sigma0 source logs")
      ->required();
  simulate->add_option("--runs", sim.runs, "Number of runs");
  simulate->add_option("--T", sim.ticks, "Ticks per run");
  simulate->add_option("--seed", sim.seed, "Simulation seed");
  simulate->add_flag("--deterministic", sim.deterministic, "Use the model mean");
  simulate->add_option("--out", sim.out_dir, "Output directory")->required();

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Compare real and virtual logs");
  fs::path real_dir, virtual_dir, verify_out;
  std::optional<fs::path> band_config;
  verify_cmd->add_option("--real", real_dir, "Real log directory")->required();
  verify_cmd->add_option("--virtual", virtual_dir, "Virtual log directory")->required();
  verify_cmd->add_option("--config", band_config, "Band config (JSON)");
  verify_cmd->add_option("--out", verify_out, "Output directory")->required();

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run an experiment plan");
  fs::path plan_path, experiment_out;
  std::optional<std::uint64_t> experiment_seed;
  std::size_t jobs = 1;
  experiment->add_option("--config", plan_path, "Experiment plan (JSON)")->required();
  experiment->add_option("--seed", experiment_seed, "Override the plan root seed");
  experiment->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  experiment->add_option("--out", experiment_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("usage", e.what(), kUsage);
  }

  try {
    if (*collect) {
      CollectConfig cfg = collect_config_from_json(read_json_file(collect_config));
      if (collect_seed) cfg.seed = *collect_seed;
      const auto files = cmd_collect(cfg, collect_out);
      std::cout << "collected " << files.size() << " logs into " << collect_out.string() << '\n';
    } else if (*train) {
      TrainOptions opt;
      opt.algorithm = parse_algorithm_arg(algorithm);
      opt.logs = train_logs;
      opt.history_length = history;
      if (train_config) opt.hyper = training_config_from_json(read_json_file(*train_config));
      opt.seed = train_seed;
      opt.out_dir = train_out;
      const auto model = cmd_train(opt);
      std::cout << "trained " << il::to_string(model.provenance.algorithm) << " on "
                << model.provenance.source_logs.size() << " logs, input dimension "
                << 2 * model.history_length << ", wrote " << (train_out / "model.json").string()
                << '\n';
    } else if (*simulate) {
      if (sim.random == !sim.model.empty()) {
        throw UsageError("simulate needs exactly one of --model or --random");
      }
      const auto files = cmd_simulate(sim);
      std::cout << "simulated " << files.size() << " runs into " << sim.out_dir.string() << '\n';
    } else if (*verify_cmd) {
      const verify::BandSpec band =
          band_config ? band_from_json(read_json_file(*band_config)) : verify::BandSpec{};
      const auto r = cmd_verify(real_dir, virtual_dir, band, verify_out);
      std::cout << "acc=" << format_decimal(r.acc) << '\n';
    } else if (*experiment) {
      ExperimentPlan plan = plan_from_json(read_json_file(plan_path));
      if (experiment_seed) plan.seed = *experiment_seed;
      const auto outcome = run_experiment(plan, experiment_out, jobs, &std::cerr);
      std::cout << "cells=" << outcome.cells << " trained=" << outcome.trainings_run
                << " reused=" << outcome.trainings_reused
                << " aborted=" << outcome.aborted_trainings
                << " summary=" << outcome.summary.string() << '\n';
    }
  } catch (const UsageError& e) {
    return report("usage", e.what(), kUsage);
  } catch (const ConfigError& e) {
    return report("config", e.what(), kConfig);
  } catch (const IoError& e) {
    return report("io", e.what(), kIo);
  } catch (const NumericalError& e) {
    return report("numerical", e.what(), kNumerical);
  } catch (const std::filesystem::filesystem_error& e) {
    return report("io", e.what(), kIo);
  } catch (const std::exception& e) {
    return report("internal", e.what(), kInternal);
  }
  return kOk;
}
