#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

#include "envi/core/types.hpp"

namespace envi::verify {

// Lane-center thresholds [center - half_width, center + half_width], closed.
struct BandSpec {
  double center = kGrayColor;
  double half_width = 10.0;

  double lower() const { return center - half_width; }
  double upper() const { return center + half_width; }
  void validate() const;
};

struct DrivingMetrics {
  double sc = 0;      // steady-state episodes
  double sd_sum = 0;  // steady ticks
  double oc = 0;      // overshoot episodes
  double oa_sum = 0;  // summed peak excess above the upper threshold
  double od_sum = 0;  // overshoot ticks
  double uc = 0;      // undershoot episodes
  double ua_sum = 0;  // summed peak shortfall below the lower threshold
  double ud_sum = 0;  // undershoot ticks

  friend bool operator==(const DrivingMetrics&, const DrivingMetrics&) = default;
};

inline constexpr std::size_t kMetricCount = 8;

enum class Metric { kSc, kSdSum, kOc, kOaSum, kOdSum, kUc, kUaSum, kUdSum };

std::string_view to_string(Metric metric);
double metric_value(const DrivingMetrics& metrics, Metric metric);

// Splits the states into maximal in-band / above / below runs.
DrivingMetrics compute_metrics(std::span<const double> states, const BandSpec& band);
DrivingMetrics compute_metrics(const Trajectory& trajectory, const BandSpec& band);

struct Requirement {
  Metric metric = Metric::kSc;
  double min = 0.0;
  double max = 1.0;
};

struct RequirementSet {
  std::array<Requirement, kMetricCount> requirements;

  // Analytic extremes for a trajectory of `ticks` states: counts
  // (0, ceil(ticks/2)+1), durations (0, ticks), amplitude sums (0, 50*ticks).
  static RequirementSet standard(std::size_t ticks);
  void validate() const;
};

// psi_i = clamp((metric_i - min_i) / (max_i - min_i), 0, 1).
std::array<double, kMetricCount> evaluate_requirements(const DrivingMetrics& metrics,
                                                       const RequirementSet& reqs);

}  // namespace envi::verify
