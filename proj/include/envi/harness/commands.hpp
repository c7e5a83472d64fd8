#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "envi/core/types.hpp"
#include "envi/harness/config.hpp"
#include "envi/il/gail.hpp"
#include "envi/il/trained_model.hpp"
#include "envi/reference/lane_world.hpp"
#include "envi/verify/accuracy.hpp"

namespace envi::harness {

namespace fs = std::filesystem;

// Controller for each source log, built from the log's recorded x.
class ControllerTable {
 public:
  explicit ControllerTable(std::span<const Trajectory> logs);
  const Controller& at(double x) const;
  il::ControllerLookup lookup() const;

 private:
  std::vector<LaneKeepingController> controllers_;
};

// Builds the dataset and networks and runs the chosen trainer. Every
// algorithm starts from the same initial networks for a given seed.
// `log_ids` (optional) is recorded as provenance.
il::TrainedModel train_model(il::Algorithm algorithm, std::span<const Trajectory> logs,
                             std::size_t history_length, const TrainingConfig& hyper,
                             std::uint64_t seed, std::span<const std::size_t> log_ids = {});

// `runs` virtual trajectories of `ticks` ticks (ticks+1 pairs). Run i starts
// from the first l pairs of sources[i % sources.size()]; the oracle is
// reseeded with derive_seed(seed, i) before each run.
std::vector<Trajectory> simulate_runs(TransitionOracle& oracle,
                                      const LaneKeepingController& controller,
                                      std::span<const Trajectory> sources, std::size_t runs,
                                      std::size_t ticks, std::uint64_t seed);

// Writes log_000.csv ... plus sidecars and manifest.json into `out_dir`.
std::vector<fs::path> cmd_collect(const CollectConfig& config, const fs::path& out_dir);

struct TrainOptions {
  il::Algorithm algorithm = il::Algorithm::kBc;
  std::vector<fs::path> logs;  // CSV files or directories of them
  std::size_t history_length = 10;
  TrainingConfig hyper;
  std::uint64_t seed = 0;
  fs::path out_dir;
};

// Writes model.json and trace.csv into out_dir. On failure (including an
// aborted GAIL run) both files are removed and the error is rethrown.
il::TrainedModel cmd_train(const TrainOptions& options);

struct SimulateOptions {
  fs::path model;  // empty with `random` set
  bool random = false;
  std::size_t history_length = 10;  // window of the random baseline
  double x = 30.0;
  fs::path sigma0_dir;
  std::size_t runs = 100;
  std::size_t ticks = 25;
  std::uint64_t seed = 0;
  bool deterministic = false;
  fs::path out_dir;
};

// Writes run_000.csv ... tagged origin=virtual.
std::vector<fs::path> cmd_simulate(const SimulateOptions& options);

// Writes report.csv and report.meta.json into out_dir.
verify::VerificationReport cmd_verify(const fs::path& real_dir, const fs::path& virtual_dir,
                                      const verify::BandSpec& band, const fs::path& out_dir);

// Logs named on the command line: files are taken as is, directories are
// expanded to their CSVs. Throws IoError when nothing is found.
std::vector<Trajectory> read_logs(std::span<const fs::path> paths);

}  // namespace envi::harness
