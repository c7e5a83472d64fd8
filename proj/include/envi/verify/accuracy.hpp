#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>

#include "envi/core/types.hpp"
#include "envi/verify/metrics.hpp"

namespace envi::verify {

struct VerificationReport {
  std::array<double, kMetricCount> psi_real{};
  std::array<double, kMetricCount> psi_virtual{};
  std::array<double, kMetricCount> abs_diff{};
  double acc = 0.0;
  std::size_t real_runs = 0;
  std::size_t virtual_runs = 0;
  // Across repetitions (see aggregate_reports); a single report has 1 and 0.
  std::size_t repetitions = 1;
  double acc_std = 0.0;
};

// Mean normalized psi per requirement over each list; acc = 1 - mean |diff|.
// Throws ConfigError on an empty list or mixed trajectory lengths.
VerificationReport verification_accuracy(std::span<const Trajectory> real_logs,
                                         std::span<const Trajectory> virtual_logs,
                                         const RequirementSet& reqs, const BandSpec& band);

// Uses RequirementSet::standard() for the shared trajectory length.
VerificationReport verification_accuracy(std::span<const Trajectory> real_logs,
                                         std::span<const Trajectory> virtual_logs,
                                         const BandSpec& band = {});

// Mean of every field over repetitions; acc_std is the sample standard
// deviation of acc (0 for a single report).
VerificationReport aggregate_reports(std::span<const VerificationReport> reports);

// `phi,psi_real,psi_virtual,abs_diff` rows, then `acc,<value>`. The band and
// requirement bounds go to a `<stem>.meta.json` sidecar.
void write_report(const std::filesystem::path& path, const VerificationReport& report,
                  const RequirementSet& reqs, const BandSpec& band);

}  // namespace envi::verify
