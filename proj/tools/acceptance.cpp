// Acceptance run: checks every primary criterion and prints one line each.
// Exit status is the number of failed criteria (capped at 100).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "envi/core/dataset.hpp"
#include "envi/core/error.hpp"
#include "envi/harness/commands.hpp"
#include "envi/harness/config.hpp"
#include "envi/harness/experiment.hpp"
#include "envi/il/bc.hpp"
#include "envi/il/gail.hpp"
#include "envi/nn/grad_check.hpp"
#include "envi/nn/mlp.hpp"
#include "envi/reference/lane_world.hpp"
#include "envi/verify/metrics.hpp"

namespace fs = std::filesystem;
using namespace envi;
using namespace envi::harness;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

Outcome ac1_gradients() {
  const auto start = Clock::now();
  double worst = 0.0;
  std::size_t nets = 0;
  std::size_t excluded = 0;
  for (const auto& arch : {nn::environment_model_architecture(), nn::discriminator_architecture(),
                           nn::critic_architecture()}) {
    for (std::uint64_t i = 0; i < 20; ++i) {
      const auto net = nn::Mlp<double>::initialized(arch, 1000 + i);
      std::mt19937_64 rng(2000 + i);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      std::vector<double> x(arch.input_dim);
      for (auto& v : x) v = u(rng);
      const auto r = nn::grad_check(net, x);
      worst = std::max(worst, r.max_relative_error);
      excluded += r.excluded.size();
      ++nets;
    }
  }
  const double t = seconds_since(start);
  return {worst < 1e-4 && t < 60.0,
          fmt("max relative error %.3g over %zu networks (%zu ReLU-kink probes skipped), %.1f s",
              worst, nets, excluded, t)};
}

Outcome ac2_truth_table() {
  std::size_t mismatches = 0;
  std::size_t cases = 0;
  for (int c = 0; c <= 100; ++c) {
    for (double x : {10.0, 20.0, 30.0, 40.0, 50.0}) {
      const double expect = c > 50 ? x : (c < 50 ? -x : 0.0);
      const LaneKeepingController ctl(ControllerConfig{x});
      mismatches += ctl.decide(State{static_cast<double>(c)}).value != expect;
      ++cases;
    }
  }
  return {mismatches == 0, fmt("%zu/%zu cases match", cases - mismatches, cases)};
}

// Run-length oracle: split the states into maximal runs of one class and
// total them per class.
verify::DrivingMetrics run_length_oracle(const std::vector<double>& s, double lo, double hi) {
  verify::DrivingMetrics m;
  std::size_t i = 0;
  while (i < s.size()) {
    const int cls = s[i] > hi ? 1 : (s[i] < lo ? -1 : 0);
    std::size_t j = i;
    double peak = 0.0;
    while (j < s.size() && (s[j] > hi ? 1 : (s[j] < lo ? -1 : 0)) == cls) {
      if (cls == 1) peak = std::max(peak, s[j] - hi);
      if (cls == -1) peak = std::max(peak, lo - s[j]);
      ++j;
    }
    const double len = static_cast<double>(j - i);
    if (cls == 0) {
      m.sc += 1;
      m.sd_sum += len;
    } else if (cls == 1) {
      m.oc += 1;
      m.od_sum += len;
      m.oa_sum += peak;
    } else {
      m.uc += 1;
      m.ud_sum += len;
      m.ua_sum += peak;
    }
    i = j;
  }
  return m;
}

Outcome ac3_metrics() {
  const verify::BandSpec band;
  std::size_t failures = 0;
  for (std::size_t n : {1, 2, 25, 26, 100}) {
    std::vector<double> ideal(n, kGrayColor);
    ideal.back() = band.upper();  // on the threshold still counts as in band
    const auto m = verify::compute_metrics(ideal, band);
    verify::DrivingMetrics expect;
    expect.sc = 1;
    expect.sd_sum = static_cast<double>(n);
    failures += !(m == expect);
  }
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> state(0.0, 100.0);
  std::uniform_int_distribution<std::size_t> length(1, 60);
  std::bernoulli_distribution sticky(0.7);
  std::size_t partition_violations = 0;
  std::size_t oracle_mismatches = 0;
  for (int k = 0; k < 1000; ++k) {
    std::vector<double> s(length(rng));
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] = i > 0 && sticky(rng) ? std::clamp(s[i - 1] + state(rng) / 10 - 5, 0.0, 100.0)
                                  : state(rng);
    }
    const auto m = verify::compute_metrics(s, band);
    partition_violations += m.sd_sum + m.od_sum + m.ud_sum != static_cast<double>(s.size());
    const auto o = run_length_oracle(s, band.lower(), band.upper());
    const bool same = m.sc == o.sc && m.sd_sum == o.sd_sum && m.oc == o.oc && m.od_sum == o.od_sum &&
                      m.uc == o.uc && m.ud_sum == o.ud_sum &&
                      std::abs(m.oa_sum - o.oa_sum) < 1e-9 && std::abs(m.ua_sum - o.ua_sum) < 1e-9;
    oracle_mismatches += !same;
  }
  return {failures == 0 && partition_violations == 0 && oracle_mismatches == 0,
          fmt("ideal-case failures %zu, partition violations %zu/1000, oracle mismatches %zu/1000",
              failures, partition_violations, oracle_mismatches)};
}

Outcome ac4_dataset() {
  std::mt19937_64 rng(91);
  std::uniform_int_distribution<std::size_t> logs_per_set(1, 8);
  std::uniform_int_distribution<std::size_t> length(1, 40);
  std::uniform_int_distribution<std::size_t> window(1, 12);
  std::uniform_real_distribution<double> value(0.0, 100.0);
  std::size_t mismatches = 0;
  std::size_t total = 0;
  std::size_t empty_sets = 0;
  for (int set = 0; set < 100; ++set) {
    const std::size_t l = window(rng);
    std::vector<Trajectory> logs(logs_per_set(rng));
    for (auto& log : logs) {
      const std::size_t n = length(rng);
      for (std::size_t i = 0; i < n; ++i) log.pairs.push_back({State{value(rng)}, Action{value(rng) - 50}});
    }
    // enumerate every (log, start) whose window and successor state exist
    std::size_t expect = 0;
    for (const auto& log : logs) {
      for (std::size_t start = 0; start < log.size(); ++start) expect += start + l < log.size();
    }
    total += expect;
    if (expect == 0) {
      // no usable log at all is a precondition error
      try {
        make_dataset(logs, l, NormSpec{});
        ++mismatches;
      } catch (const ConfigError&) {
        ++empty_sets;
      }
      continue;
    }
    mismatches += make_dataset(logs, l, NormSpec{}).samples.size() != expect;
  }
  return {mismatches == 0, fmt("100 random log sets (%zu without usable logs), %zu samples, %zu mismatches",
                               empty_sets, total, mismatches)};
}

// ---------------------------------------------------------------------------

std::map<std::pair<std::string, std::size_t>, std::map<double, double>> by_cell(
    const std::vector<ResultRow>& rows) {
  std::map<std::pair<std::string, std::size_t>, std::map<double, double>> out;
  for (const auto& r : rows) out[{r.algorithm, r.log_count}][r.x] = r.acc_mean;
  return out;
}

Outcome ac5_tovk(const fs::path& work, std::size_t jobs) {
  const auto start = Clock::now();
  ExperimentPlan plan = default_plan(UseCase::kTovk);
  plan.log_counts = {3, 30};
  plan.repetitions = 10;
  plan.seed = 5;
  const auto out = run_experiment(plan, work / "tovk", jobs, &std::cerr);
  const double t = seconds_since(start);
  const auto acc = by_cell(out.rows);
  bool ok = true;
  std::string detail;
  for (std::size_t n : plan.log_counts) {
    const double random = acc.at({"RANDOM", n}).at(30.0);
    detail += fmt("n=%zu RANDOM %.4f", n, random);
    for (const char* alg : {"BC", "GAIL", "BCxGAIL"}) {
      const double a = acc.at({alg, n}).at(30.0);
      const bool good = a >= 0.90 && a - random >= 0.05;
      ok &= good;
      detail += fmt(" %s %.4f%s", alg, a, good ? "" : "(!)");
    }
    detail += "; ";
  }
  const bool in_budget = t < 1800.0;
  detail += fmt("%.0f s with %zu worker(s)%s", t, jobs, in_budget ? "" : " (over the 30 min budget)");
  return {ok && in_budget, detail};
}

ExperimentPlan multi_version_plan(UseCase use_case) {
  ExperimentPlan plan = default_plan(use_case);
  plan.algorithms = {AlgorithmChoice::parse("BCxGAIL"), AlgorithmChoice::parse("RANDOM")};
  plan.log_counts = {10};
  plan.repetitions = 10;
  plan.seed = 6;
  return plan;
}

// TMVK and TMVU plans share a fingerprint, so the second run reuses the
// trained models and only evaluates the unseen versions.
Outcome ac6_tmvk(const fs::path& work, std::size_t jobs) {
  const auto start = Clock::now();
  const auto plan = multi_version_plan(UseCase::kTmvk);
  const auto out = run_experiment(plan, work / "multi", jobs, &std::cerr);
  const double t = seconds_since(start);
  const auto acc = by_cell(out.rows);
  bool ok = true;
  std::string detail;
  for (double x : plan.verification_versions) {
    const double a = acc.at({"BCxGAIL", 10}).at(x);
    const double r = acc.at({"RANDOM", 10}).at(x);
    const bool good = a >= 0.85 && a - r >= 0.05;
    ok &= good;
    detail += fmt("x=%g BCxGAIL %.4f RANDOM %.4f%s; ", x, a, r, good ? "" : "(!)");
  }
  const bool in_budget = t < 1800.0;
  detail += fmt("%.0f s with %zu worker(s)%s", t, jobs, in_budget ? "" : " (over the 30 min budget)");
  return {ok && in_budget, detail};
}

Outcome ac7_tmvu(const fs::path& work, std::size_t jobs) {
  const auto plan = multi_version_plan(UseCase::kTmvu);
  const auto out = run_experiment(plan, work / "multi", jobs, &std::cerr);
  const auto acc = by_cell(out.rows);
  bool ok = true;
  std::string detail;
  for (double x : plan.verification_versions) {
    const double a = acc.at({"BCxGAIL", 10}).at(x);
    const double r = acc.at({"RANDOM", 10}).at(x);
    const bool good = a - r >= 0.05;
    ok &= good;
    detail += fmt("x=%g BCxGAIL %.4f RANDOM %.4f%s; ", x, a, r, good ? "" : "(!)");
  }
  detail += fmt("models reused %zu, trained %zu", out.trainings_reused, out.trainings_run);
  return {ok, detail};
}

Outcome ac8_bc_loss() {
  const auto logs = collect_fot_logs(ControllerConfig{30}, 30, 25, 0.5, 8);
  const Dataset data = make_dataset(logs, 10, NormSpec{});
  auto nets = il::make_networks(10, 8);
  const auto model = il::train_bc(std::move(nets.model), data, il::BcHyper{}, 8);
  const double first = model.trace.epochs.front().loss_bc;
  const double last = model.trace.epochs.back().loss_bc;
  return {last < 0.1 * first,
          fmt("first-epoch MSE %.5f, final-epoch MSE %.5f (ratio %.4f) over %zu epochs", first,
              last, last / first, model.trace.epochs.size())};
}

// Moving average of the rollout reward, recomputed from the trace.
bool trend_oracle(const std::vector<il::EpochRecord>& epochs, std::size_t window,
                  std::size_t tail) {
  std::vector<double> avg;
  for (const auto& r : epochs) {
    if (std::isnan(r.mean_reward)) return false;
  }
  for (std::size_t e = window - 1; e < epochs.size(); ++e) {
    double s = 0.0;
    for (std::size_t k = e + 1 - window; k <= e; ++k) s += epochs[k].mean_reward;
    avg.push_back(s / static_cast<double>(window));
  }
  const std::size_t first_epoch = epochs.size() - tail;
  for (std::size_t e = std::max(first_epoch + 1, window); e < epochs.size(); ++e) {
    if (avg[e - window + 1] < avg[e - window]) return false;
  }
  return true;
}

Outcome ac9_reward_trend() {
  const auto logs = collect_fot_logs(ControllerConfig{30}, 3, 25, 0.5, 9);
  const Dataset data = make_dataset(logs, 10, NormSpec{});
  const LaneKeepingController ctl(ControllerConfig{30});
  const auto model = il::train_gail(il::make_networks(10, 9), ctl, data, il::GailHyper{}, 9);
  const auto& ep = model.trace.epochs;
  const bool oracle = trend_oracle(ep, 30, 200);
  const bool consistent = oracle == model.trace.reward_converged && ep.size() == 300;
  return {consistent,
          fmt("%zu epochs, trend %s, flag reward_converged=%s %s", ep.size(),
              oracle ? "non-decreasing" : "decreasing somewhere",
              model.trace.reward_converged ? "true" : "false",
              model.trace.reward_converged ? "" : "(flagged non-converged, not a failure)")};
}

Outcome ac10_reproducibility(const fs::path& work) {
  ExperimentPlan plan = default_plan(UseCase::kTovk);
  plan.algorithms = {AlgorithmChoice::parse("BC"), AlgorithmChoice::parse("GAIL"),
                     AlgorithmChoice::parse("RANDOM")};
  plan.log_counts = {3, 6};
  plan.repetitions = 2;
  plan.runs = 20;
  plan.eval_pool_size = 20;
  plan.bc.epochs = 20;
  plan.gail.epochs = 5;
  plan.seed = 10;
  fs::remove_all(work / "repro_a");
  fs::remove_all(work / "repro_b");
  const auto a = run_experiment(plan, work / "repro_a", 1);
  const auto b = run_experiment(plan, work / "repro_b", 2);
  const std::string sa = slurp(a.summary);
  const bool same = !sa.empty() && sa == slurp(b.summary);
  return {same && a.trainings_run == b.trainings_run,
          fmt("two fresh runs (1 and 2 workers), %zu rows, summaries %s", a.rows.size(),
              same ? "byte-identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  fs::path work = fs::temp_directory_path() / "envi_acceptance";
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  bool fresh = false;
  std::vector<int> only;
  app.add_option("--work", work, "Work directory for experiment artifacts");
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--fresh", fresh, "Remove the work directory first");
  app.add_option("--only", only, "Run only these criteria (1-10)");
  CLI11_PARSE(app, argc, argv);

  if (fresh) fs::remove_all(work);
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient correctness", ac1_gradients},
      {"controller truth table", ac2_truth_table},
      {"metric identities", ac3_metrics},
      {"dataset law", ac4_dataset},
      {"TOVK separation", [&] { return ac5_tovk(work, jobs); }},
      {"TMVK accuracy", [&] { return ac6_tmvk(work, jobs); }},
      {"TMVU generalization", [&] { return ac7_tmvu(work, jobs); }},
      {"BC loss convergence", ac8_bc_loss},
      {"GAIL reward trend", ac9_reward_trend},
      {"reproducibility", [&] { return ac10_reproducibility(work); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "AC" << id << " " << (o.pass ? "PASS" : "FAIL") << " " << criteria[i].first
              << ": " << o.detail << std::endl;
  }
  return std::min(failed, 100);
}
