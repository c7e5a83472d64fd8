#include "envi/verify/accuracy.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "envi/core/error.hpp"
#include "envi/core/trajectory_io.hpp"

namespace envi::verify {
namespace {

std::size_t common_length(std::span<const Trajectory> a, std::span<const Trajectory> b) {
  if (a.empty() || b.empty()) throw ConfigError("verification needs real and virtual logs");
  const std::size_t n = a.front().size();
  for (auto list : {a, b}) {
    for (const auto& t : list) {
      if (t.size() != n) {
        throw ConfigError("trajectory lengths differ (" + std::to_string(n) + " vs " +
                          std::to_string(t.size()) + ")");
      }
    }
  }
  if (n == 0) throw ConfigError("trajectories are empty");
  return n;
}

std::array<double, kMetricCount> mean_psi(std::span<const Trajectory> logs,
                                          const RequirementSet& reqs, const BandSpec& band) {
  std::array<double, kMetricCount> sum{};
  for (const auto& t : logs) {
    const auto psi = evaluate_requirements(compute_metrics(t, band), reqs);
    for (std::size_t i = 0; i < kMetricCount; ++i) sum[i] += psi[i];
  }
  for (double& v : sum) v /= static_cast<double>(logs.size());
  return sum;
}

}  // namespace

VerificationReport verification_accuracy(std::span<const Trajectory> real_logs,
                                         std::span<const Trajectory> virtual_logs,
                                         const RequirementSet& reqs, const BandSpec& band) {
  common_length(real_logs, virtual_logs);
  band.validate();
  VerificationReport r;
  r.psi_real = mean_psi(real_logs, reqs, band);
  r.psi_virtual = mean_psi(virtual_logs, reqs, band);
  double total = 0.0;
  for (std::size_t i = 0; i < kMetricCount; ++i) {
    r.abs_diff[i] = std::abs(r.psi_real[i] - r.psi_virtual[i]);
    total += r.abs_diff[i];
  }
  r.acc = 1.0 - total / static_cast<double>(kMetricCount);
  r.real_runs = real_logs.size();
  r.virtual_runs = virtual_logs.size();
  return r;
}

VerificationReport verification_accuracy(std::span<const Trajectory> real_logs,
                                         std::span<const Trajectory> virtual_logs,
                                         const BandSpec& band) {
  const std::size_t n = common_length(real_logs, virtual_logs);
  return verification_accuracy(real_logs, virtual_logs, RequirementSet::standard(n), band);
}

VerificationReport aggregate_reports(std::span<const VerificationReport> reports) {
  if (reports.empty()) throw ConfigError("no reports to aggregate");
  const auto k = static_cast<double>(reports.size());
  VerificationReport out;
  out.acc = 0.0;
  out.real_runs = 0;
  out.virtual_runs = 0;
  for (const auto& r : reports) {
    for (std::size_t i = 0; i < kMetricCount; ++i) {
      out.psi_real[i] += r.psi_real[i] / k;
      out.psi_virtual[i] += r.psi_virtual[i] / k;
      out.abs_diff[i] += r.abs_diff[i] / k;
    }
    out.acc += r.acc;
    out.real_runs += r.real_runs;
    out.virtual_runs += r.virtual_runs;
  }
  out.acc /= k;
  out.repetitions = reports.size();
  double ss = 0.0;
  for (const auto& r : reports) ss += (r.acc - out.acc) * (r.acc - out.acc);
  out.acc_std = reports.size() > 1 ? std::sqrt(ss / (k - 1.0)) : 0.0;
  return out;
}

void write_report(const std::filesystem::path& path, const VerificationReport& report,
                  const RequirementSet& reqs, const BandSpec& band) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write report " + path.string());
  out << "phi,psi_real,psi_virtual,abs_diff\n";
  for (std::size_t i = 0; i < kMetricCount; ++i) {
    out << to_string(reqs.requirements[i].metric) << ',' << format_decimal(report.psi_real[i])
        << ',' << format_decimal(report.psi_virtual[i]) << ','
        << format_decimal(report.abs_diff[i]) << '\n';
  }
  out << "acc," << format_decimal(report.acc) << '\n';
  if (!out) throw IoError("failed writing report " + path.string());

  nlohmann::json meta;
  meta["band"] = {{"center", band.center}, {"half_width", band.half_width}};
  for (const auto& r : reqs.requirements) {
    meta["bounds"][std::string(to_string(r.metric))] = {r.min, r.max};
  }
  meta["real_runs"] = report.real_runs;
  meta["virtual_runs"] = report.virtual_runs;
  std::ofstream side(sidecar_path(path), std::ios::binary);
  if (!side) throw IoError("cannot write report metadata for " + path.string());
  side << meta.dump(2) << '\n';
}

}  // namespace envi::verify
