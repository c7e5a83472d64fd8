#include "envi/verify/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "envi/core/error.hpp"

namespace envi::verify {

void BandSpec::validate() const {
  if (!(half_width > 0.0 && half_width < 50.0)) {
    throw ConfigError("band half_width must lie in (0, 50)");
  }
  if (!std::isfinite(center)) throw ConfigError("band center must be finite");
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::kSc: return "sc";
    case Metric::kSdSum: return "sd_sum";
    case Metric::kOc: return "oc";
    case Metric::kOaSum: return "oa_sum";
    case Metric::kOdSum: return "od_sum";
    case Metric::kUc: return "uc";
    case Metric::kUaSum: return "ua_sum";
    case Metric::kUdSum: return "ud_sum";
  }
  return "?";
}

double metric_value(const DrivingMetrics& m, Metric metric) {
  switch (metric) {
    case Metric::kSc: return m.sc;
    case Metric::kSdSum: return m.sd_sum;
    case Metric::kOc: return m.oc;
    case Metric::kOaSum: return m.oa_sum;
    case Metric::kOdSum: return m.od_sum;
    case Metric::kUc: return m.uc;
    case Metric::kUaSum: return m.ua_sum;
    case Metric::kUdSum: return m.ud_sum;
  }
  return 0.0;
}

DrivingMetrics compute_metrics(std::span<const double> states, const BandSpec& band) {
  band.validate();
  DrivingMetrics m;
  const double lo = band.lower();
  const double hi = band.upper();
  int previous = 2;  // none yet
  double peak = 0.0;
  auto close_episode = [&](int kind) {
    if (kind == 1) m.oa_sum += peak;
    if (kind == -1) m.ua_sum += peak;
  };
  for (double s : states) {
    const int kind = s > hi ? 1 : (s < lo ? -1 : 0);
    if (kind != previous) {
      close_episode(previous);
      peak = 0.0;
      if (kind == 0) m.sc += 1;
      if (kind == 1) m.oc += 1;
      if (kind == -1) m.uc += 1;
      previous = kind;
    }
    if (kind == 0) m.sd_sum += 1;
    if (kind == 1) {
      m.od_sum += 1;
      peak = std::max(peak, s - hi);
    }
    if (kind == -1) {
      m.ud_sum += 1;
      peak = std::max(peak, lo - s);
    }
  }
  close_episode(previous);
  return m;
}

DrivingMetrics compute_metrics(const Trajectory& trajectory, const BandSpec& band) {
  const auto states = trajectory.states();
  return compute_metrics(std::span<const double>(states), band);
}

RequirementSet RequirementSet::standard(std::size_t ticks) {
  const auto n = static_cast<double>(ticks);
  const double counts = std::ceil(n / 2.0) + 1.0;
  const double amplitude = 50.0 * n;
  return {{{{Metric::kSc, 0.0, counts},
            {Metric::kSdSum, 0.0, n},
            {Metric::kOc, 0.0, counts},
            {Metric::kOaSum, 0.0, amplitude},
            {Metric::kOdSum, 0.0, n},
            {Metric::kUc, 0.0, counts},
            {Metric::kUaSum, 0.0, amplitude},
            {Metric::kUdSum, 0.0, n}}}};
}

void RequirementSet::validate() const {
  for (const auto& r : requirements) {
    if (!(r.min < r.max) || !std::isfinite(r.min) || !std::isfinite(r.max)) {
      throw ConfigError("requirement bounds for " + std::string(to_string(r.metric)) +
                        " need min < max");
    }
  }
}

std::array<double, kMetricCount> evaluate_requirements(const DrivingMetrics& metrics,
                                                       const RequirementSet& reqs) {
  reqs.validate();
  std::array<double, kMetricCount> psi{};
  for (std::size_t i = 0; i < kMetricCount; ++i) {
    const auto& r = reqs.requirements[i];
    psi[i] = std::clamp((metric_value(metrics, r.metric) - r.min) / (r.max - r.min), 0.0, 1.0);
  }
  return psi;
}

}  // namespace envi::verify
