#include "envi/harness/commands.hpp"

#include <algorithm>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "envi/core/dataset.hpp"
#include "envi/core/error.hpp"
#include "envi/core/rollout.hpp"
#include "envi/core/seeds.hpp"
#include "envi/core/trajectory_io.hpp"
#include "envi/harness/checksum.hpp"
#include "envi/il/bc.hpp"
#include "envi/il/gail.hpp"
#include "envi/verify/random_baseline.hpp"

namespace envi::harness {
namespace {

std::string numbered(const char* prefix, std::size_t i, std::size_t count) {
  const std::size_t width = std::max<std::size_t>(3, std::to_string(count - 1).size());
  std::string digits = std::to_string(i);
  digits.insert(0, width - std::min(width, digits.size()), '0');
  return std::string(prefix) + "_" + digits + ".csv";
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create directory " + dir.string());
  }
}

}  // namespace

ControllerTable::ControllerTable(std::span<const Trajectory> logs) {
  std::vector<double> xs;
  for (const auto& log : logs) xs.push_back(log.meta.controller_x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  for (double x : xs) {
    if (!(x > 0.0)) throw ConfigError("source log has no usable controller x");
    controllers_.emplace_back(ControllerConfig{x});
  }
}

const Controller& ControllerTable::at(double x) const {
  for (const auto& c : controllers_) {
    if (c.x() == x) return c;
  }
  throw ConfigError("no controller for x=" + format_decimal(x));
}

il::ControllerLookup ControllerTable::lookup() const {
  return [this](double x) -> const Controller& { return at(x); };
}

il::TrainedModel train_model(il::Algorithm algorithm, std::span<const Trajectory> logs,
                             std::size_t history_length, const TrainingConfig& hyper,
                             std::uint64_t seed, std::span<const std::size_t> log_ids) {
  const Dataset data = make_dataset(logs, history_length, NormSpec{}, log_ids);
  il::Networks nets = il::make_networks(history_length, seed);
  switch (algorithm) {
    case il::Algorithm::kBc:
      return il::train_bc(std::move(nets.model), data, hyper.bc, seed);
    case il::Algorithm::kGail: {
      const ControllerTable table(logs);
      return il::train_gail(std::move(nets), table.lookup(), data, hyper.gail, seed);
    }
    case il::Algorithm::kBcxGail: {
      const ControllerTable table(logs);
      return il::train_bcxgail(std::move(nets), table.lookup(), data, hyper.gail, seed);
    }
  }
  throw ConfigError("unknown algorithm");
}

std::vector<Trajectory> simulate_runs(TransitionOracle& oracle,
                                      const LaneKeepingController& controller,
                                      std::span<const Trajectory> sources, std::size_t runs,
                                      std::size_t ticks, std::uint64_t seed) {
  const std::size_t l = oracle.window_length();
  if (sources.empty()) throw ConfigError("simulation needs at least one sigma0 source log");
  if (runs == 0) throw ConfigError("simulation needs runs >= 1");
  if (ticks + 1 <= l) throw ConfigError("T must exceed the history length minus one");
  for (const auto& s : sources) {
    if (s.size() < l) {
      throw ConfigError("sigma0 source has " + std::to_string(s.size()) +
                        " pairs but the model needs " + std::to_string(l));
    }
  }
  std::vector<Trajectory> out;
  out.reserve(runs);
  for (std::size_t i = 0; i < runs; ++i) {
    const HistoryWindow init = extract_sigma0(sources[i % sources.size()], l);
    Trajectory t = rollout(oracle, controller, init, ticks + 1 - l, derive_seed(seed, i));
    t.meta.controller_x = controller.x();
    t.meta.origin = Origin::kVirtual;
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Trajectory> read_logs(std::span<const fs::path> paths) {
  std::vector<Trajectory> logs;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      for (auto& t : read_trajectory_dir(p)) logs.push_back(std::move(t));
    } else {
      logs.push_back(read_trajectory(p));
    }
  }
  if (logs.empty()) throw IoError("no trajectory logs found");
  return logs;
}

std::vector<fs::path> cmd_collect(const CollectConfig& config, const fs::path& out_dir) {
  config.validate();
  ensure_dir(out_dir);
  const auto logs = collect_fot_logs(ControllerConfig{config.x}, config.count, config.ticks,
                                     config.noise_sigma, config.seed, config.env);
  std::vector<fs::path> files;
  nlohmann::ordered_json manifest;
  manifest["x"] = config.x;
  manifest["count"] = config.count;
  manifest["T"] = config.ticks;
  manifest["noise_sigma"] = config.noise_sigma;
  manifest["seed"] = config.seed;
  manifest["env"] = to_json(config.env);
  manifest["files"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const fs::path file = out_dir / numbered("log", i, logs.size());
    write_trajectory(file, logs[i]);
    files.push_back(file);
    manifest["files"].push_back(
        {{"name", file.filename().string()}, {"sha256", sha256_file(file)}});
  }
  std::ofstream out(out_dir / "manifest.json", std::ios::binary);
  if (!out) throw IoError("cannot write manifest in " + out_dir.string());
  out << manifest.dump(2) << '\n';
  return files;
}

il::TrainedModel cmd_train(const TrainOptions& options) {
  const auto logs = read_logs(options.logs);
  ensure_dir(options.out_dir);
  const fs::path model_path = options.out_dir / "model.json";
  const fs::path trace_path = options.out_dir / "trace.csv";
  try {
    il::TrainedModel model = train_model(options.algorithm, logs, options.history_length,
                                         options.hyper, options.seed);
    if (model.trace.aborted) throw NumericalError(model.trace.abort_reason);
    save_model(model_path, model);
    write_trace_csv(trace_path, model.trace);
    return model;
  } catch (...) {
    std::error_code ec;
    fs::remove(model_path, ec);
    fs::remove(trace_path, ec);
    throw;
  }
}

std::vector<fs::path> cmd_simulate(const SimulateOptions& options) {
  const auto sources = read_trajectory_dir(options.sigma0_dir);
  if (sources.empty()) throw IoError("no sigma0 logs in " + options.sigma0_dir.string());
  const LaneKeepingController controller(ControllerConfig{options.x});

  std::vector<Trajectory> runs;
  if (options.random) {
    verify::RandomBaseline oracle(options.history_length);
    runs = simulate_runs(oracle, controller, sources, options.runs, options.ticks, options.seed);
  } else {
    const il::TrainedModel model = il::load_model(options.model);
    il::ModelOracle oracle(model, model.stochastic && !options.deterministic);
    runs = simulate_runs(oracle, controller, sources, options.runs, options.ticks, options.seed);
  }
  ensure_dir(options.out_dir);
  std::vector<fs::path> files;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const fs::path file = options.out_dir / numbered("run", i, runs.size());
    write_trajectory(file, runs[i]);
    files.push_back(file);
  }
  return files;
}

verify::VerificationReport cmd_verify(const fs::path& real_dir, const fs::path& virtual_dir,
                                      const verify::BandSpec& band, const fs::path& out_dir) {
  const auto real = read_trajectory_dir(real_dir);
  const auto virt = read_trajectory_dir(virtual_dir);
  if (real.empty()) throw ConfigError("no real logs in " + real_dir.string());
  if (virt.empty()) throw ConfigError("no virtual logs in " + virtual_dir.string());
  const auto reqs = verify::RequirementSet::standard(real.front().size());
  const auto report = verify::verification_accuracy(real, virt, reqs, band);
  ensure_dir(out_dir);
  verify::write_report(out_dir / "report.csv", report, reqs, band);
  return report;
}

}  // namespace envi::harness
