#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "envi/harness/config.hpp"

namespace envi::harness {

struct ResultRow {
  std::string algorithm;
  std::size_t log_count = 0;
  double x = 0.0;
  double acc_mean = 0.0;
  double acc_std = 0.0;  // sample standard deviation over repetitions
  std::size_t repetitions = 0;
};

struct ExperimentOutcome {
  std::vector<ResultRow> rows;
  std::filesystem::path summary;
  std::size_t cells = 0;
  std::size_t trainings_run = 0;
  std::size_t trainings_reused = 0;
  std::size_t evaluations_run = 0;
  std::size_t evaluations_reused = 0;
  std::size_t aborted_trainings = 0;
};

// Seed streams, all derived from the plan's root seed.
std::uint64_t version_seed(std::uint64_t root, double x);
std::uint64_t train_pool_seed(std::uint64_t root, double x);
std::uint64_t eval_pool_seed(std::uint64_t root, double x);
std::uint64_t cell_seed(std::uint64_t root, const std::string& algorithm, std::size_t log_count,
                        std::size_t repetition);

// `count` distinct indices from [0, pool), in draw order.
std::vector<std::size_t> sample_without_replacement(std::size_t pool, std::size_t count,
                                                    std::uint64_t seed);

// Identifies everything that determines trained models and their accuracy,
// excluding use case, verification versions, log counts, algorithms and
// repetitions. Plans sharing it share cell artifacts.
std::string plan_fingerprint(const ExperimentPlan& plan);

// Runs every (algorithm, log_count, repetition) cell on up to `jobs`
// threads, reusing cell artifacts whose checksums still validate, and writes
// summary_<USE_CASE>.csv into out_dir. Progress lines go to `log` if set.
ExperimentOutcome run_experiment(const ExperimentPlan& plan, const std::filesystem::path& out_dir,
                                 std::size_t jobs, std::ostream* log = nullptr);

// `algorithm,log_count,x,acc_mean,acc_std` with six decimals.
void write_summary_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_summary_csv(const std::filesystem::path& path);

}  // namespace envi::harness
