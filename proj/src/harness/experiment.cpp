#include "envi/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "envi/core/error.hpp"
#include "envi/core/seeds.hpp"
#include "envi/core/trajectory_io.hpp"
#include "envi/harness/checksum.hpp"
#include "envi/harness/commands.hpp"
#include "envi/il/trained_model.hpp"
#include "envi/verify/accuracy.hpp"
#include "envi/verify/random_baseline.hpp"

namespace envi::harness {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string version_label(double x) { return "x" + format_decimal(x); }

struct Cell {
  AlgorithmChoice algorithm;
  std::size_t log_count = 0;
  std::size_t repetition = 0;

  std::string name() const {
    return algorithm.name() + "_n" + std::to_string(log_count) + "_r" +
           std::to_string(repetition);
  }
};

struct Pools {
  std::map<double, std::vector<Trajectory>> train;
  std::map<double, std::vector<Trajectory>> eval;
};

Pools make_pools(const ExperimentPlan& plan) {
  Pools pools;
  for (double x : plan.training_versions) {
    pools.train[x] = collect_fot_logs(ControllerConfig{x}, plan.train_pool_size, plan.ticks,
                                      plan.noise_sigma, train_pool_seed(plan.seed, x), plan.env);
  }
  for (double x : plan.verification_versions) {
    pools.eval[x] = collect_fot_logs(ControllerConfig{x}, plan.eval_pool_size, plan.ticks,
                                     plan.noise_sigma, eval_pool_seed(plan.seed, x), plan.env);
  }
  return pools;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

struct CellCounts {
  std::size_t trained = 0;
  std::size_t reused = 0;
  std::size_t evaluated = 0;
  std::size_t eval_reused = 0;
  std::size_t aborted = 0;
};

// Trains (or reloads) the cell's model and evaluates it against every
// verification version. Returns acc per version in plan order.
std::vector<double> run_cell(const ExperimentPlan& plan, const Pools& pools, const Cell& cell,
                             const fs::path& dir, CellCounts& counts) {
  fs::create_directories(dir);
  ChecksumMap sums = read_checksums(dir);
  const std::uint64_t seed =
      cell_seed(plan.seed, cell.algorithm.name(), cell.log_count, cell.repetition);

  std::optional<il::TrainedModel> model;
  if (!cell.algorithm.random) {
    if (checksum_matches(dir, sums, "model.json") && checksum_matches(dir, sums, "trace.csv")) {
      model = il::load_model(dir / "model.json");
      ++counts.reused;
    } else {
      std::vector<Trajectory> logs;
      std::vector<std::size_t> ids;
      std::size_t offset = 0;
      for (double x : plan.training_versions) {
        const auto& pool = pools.train.at(x);
        const auto picks = sample_without_replacement(
            pool.size(), cell.log_count, derive_seed(seed, "sample/" + version_label(x)));
        for (std::size_t i : picks) {
          logs.push_back(pool[i]);
          ids.push_back(offset + i);
        }
        offset += pool.size();
      }
      model = train_model(cell.algorithm.trainer, logs, plan.history_length,
                          TrainingConfig{plan.bc, plan.gail}, derive_seed(seed, "model"), ids);
      il::save_model(dir / "model.json", *model);
      il::write_trace_csv(dir / "trace.csv", model->trace);
      sums["model.json"] = sha256_file(dir / "model.json");
      sums["trace.csv"] = sha256_file(dir / "trace.csv");
      write_checksums(dir, sums);
      ++counts.trained;
    }
    if (model->trace.aborted) ++counts.aborted;
  }

  std::vector<double> accs;
  for (double x : plan.verification_versions) {
    const std::string name = "acc_" + version_label(x) + ".json";
    if (checksum_matches(dir, sums, name)) {
      std::ifstream in(dir / name);
      accs.push_back(json::parse(in).at("acc").get<double>());
      ++counts.eval_reused;
      continue;
    }
    const auto& real = pools.eval.at(x);
    const LaneKeepingController controller(ControllerConfig{x});
    const std::uint64_t sim_seed = derive_seed(seed, "simulate/" + version_label(x));
    std::vector<Trajectory> virt;
    if (cell.algorithm.random) {
      verify::RandomBaseline oracle(plan.history_length);
      virt = simulate_runs(oracle, controller, real, plan.runs, plan.ticks, sim_seed);
    } else {
      il::ModelOracle oracle(*model, model->stochastic);
      virt = simulate_runs(oracle, controller, real, plan.runs, plan.ticks, sim_seed);
    }
    const auto report = verify::verification_accuracy(
        real, virt, verify::RequirementSet::standard(real.front().size()), plan.band);
    json j;
    j["x"] = x;
    j["acc"] = report.acc;
    j["psi_real"] = report.psi_real;
    j["psi_virtual"] = report.psi_virtual;
    j["runs"] = report.virtual_runs;
    write_text(dir / name, j.dump(2) + "\n");
    sums[name] = sha256_file(dir / name);
    write_checksums(dir, sums);
    accs.push_back(report.acc);
    ++counts.evaluated;
  }
  return accs;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::uint64_t version_seed(std::uint64_t root, double x) {
  return derive_seed(root, "version/" + version_label(x));
}

std::uint64_t train_pool_seed(std::uint64_t root, double x) {
  return derive_seed(version_seed(root, x), "train-pool");
}

std::uint64_t eval_pool_seed(std::uint64_t root, double x) {
  return derive_seed(version_seed(root, x), "eval-pool");
}

std::uint64_t cell_seed(std::uint64_t root, const std::string& algorithm, std::size_t log_count,
                        std::size_t repetition) {
  const auto cell = derive_seed(root, "cell/" + algorithm + "/n" + std::to_string(log_count));
  return derive_seed(cell, static_cast<std::uint64_t>(repetition));
}

std::vector<std::size_t> sample_without_replacement(std::size_t pool, std::size_t count,
                                                    std::uint64_t seed) {
  if (count > pool) throw ConfigError("cannot draw more logs than the pool holds");
  std::vector<std::size_t> idx(pool);
  for (std::size_t i = 0; i < pool; ++i) idx[i] = i;
  // Partial Fisher-Yates on raw engine output keeps draws identical across
  // standard libraries.
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (pool - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  return idx;
}

std::string plan_fingerprint(const ExperimentPlan& plan) {
  json j = to_json(plan);
  for (const char* key : {"use_case", "verification_versions", "log_counts", "algorithms",
                          "repetitions"}) {
    j.erase(key);
  }
  return sha256_hex(j.dump()).substr(0, 16);
}

ExperimentOutcome run_experiment(const ExperimentPlan& plan, const fs::path& out_dir,
                                 std::size_t jobs, std::ostream* log) {
  plan.validate();
  if (jobs == 0) throw ConfigError("jobs must be >= 1");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (!fs::is_directory(out_dir)) throw IoError("cannot create " + out_dir.string());

  const std::string fingerprint = plan_fingerprint(plan);
  const fs::path cells_root = out_dir / "cells" / fingerprint;
  fs::create_directories(cells_root);
  {
    json recorded = to_json(plan);
    write_text(cells_root / "plan.json", recorded.dump(2) + "\n");
  }

  const Pools pools = make_pools(plan);

  std::vector<Cell> cells;
  for (const auto& alg : plan.algorithms) {
    for (std::size_t n : plan.log_counts) {
      for (std::size_t r = 0; r < plan.repetitions; ++r) cells.push_back({alg, n, r});
    }
  }

  std::vector<std::vector<double>> results(cells.size());
  std::vector<CellCounts> counts(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        results[i] = run_cell(plan, pools, cells[i], cells_root / cells[i].name(), counts[i]);
        if (log) {
          std::lock_guard lock(log_mutex);
          const bool reused = counts[i].reused || counts[i].eval_reused;
          *log << "cell " << cells[i].name() << " done" << (reused ? " (reused)" : "") << '\n';
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(jobs, cells.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ExperimentOutcome outcome;
  outcome.cells = cells.size();
  for (const auto& c : counts) {
    outcome.trainings_run += c.trained;
    outcome.trainings_reused += c.reused;
    outcome.evaluations_run += c.evaluated;
    outcome.evaluations_reused += c.eval_reused;
    outcome.aborted_trainings += c.aborted;
  }

  // Cells are laid out algorithm-major, then log count, then repetition.
  std::size_t base = 0;
  for (const auto& alg : plan.algorithms) {
    for (std::size_t n : plan.log_counts) {
      for (std::size_t v = 0; v < plan.verification_versions.size(); ++v) {
        ResultRow row{alg.name(), n, plan.verification_versions[v], 0.0, 0.0, plan.repetitions};
        const auto k = static_cast<double>(plan.repetitions);
        for (std::size_t r = 0; r < plan.repetitions; ++r) row.acc_mean += results[base + r][v];
        row.acc_mean /= k;
        double ss = 0.0;
        for (std::size_t r = 0; r < plan.repetitions; ++r) {
          const double d = results[base + r][v] - row.acc_mean;
          ss += d * d;
        }
        row.acc_std = plan.repetitions > 1 ? std::sqrt(ss / (k - 1.0)) : 0.0;
        outcome.rows.push_back(row);
      }
      base += plan.repetitions;
    }
  }
  outcome.summary = out_dir / ("summary_" + std::string(to_string(plan.use_case)) + ".csv");
  write_summary_csv(outcome.summary, outcome.rows);
  return outcome;
}

void write_summary_csv(const fs::path& path, const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << "algorithm,log_count,x,acc_mean,acc_std\n";
  for (const auto& r : rows) {
    out << r.algorithm << ',' << r.log_count << ',' << format_decimal(r.x) << ','
        << fixed6(r.acc_mean) << ',' << fixed6(r.acc_std) << '\n';
  }
  write_text(path, out.str());
}

std::vector<ResultRow> read_summary_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "algorithm,log_count,x,acc_mean,acc_std") {
    throw IoError(path.string() + ": unexpected summary header");
  }
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 5) throw IoError(path.string() + ": malformed row '" + line + "'");
    ResultRow r;
    r.algorithm = cells[0];
    r.log_count = static_cast<std::size_t>(std::stoull(cells[1]));
    r.x = parse_decimal(cells[2]);
    r.acc_mean = parse_decimal(cells[3]);
    r.acc_std = parse_decimal(cells[4]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace envi::harness
