#include "envi/core/normalization.hpp"

#include <algorithm>
#include <cmath>

#include "envi/core/error.hpp"

namespace envi {
namespace {

void check_range(Range range) {
  if (!(range.min < range.max) || !std::isfinite(range.min) ||
      !std::isfinite(range.max)) {
    throw ConfigError("degenerate normalization range");
  }
}

}  // namespace

void NormSpec::validate() const {
  check_range(state);
  check_range(action);
}

double normalize(double value, Range range) {
  check_range(range);
  const double clamped = std::clamp(value, range.min, range.max);
  return 2.0 * (clamped - range.min) / (range.max - range.min) - 1.0;
}

double denormalize(double value, Range range) {
  check_range(range);
  return range.min + (value + 1.0) * 0.5 * (range.max - range.min);
}

template <typename Scalar>
void window_features(const HistoryWindow& window, const NormSpec& norm,
                     std::span<Scalar> out) {
  if (out.size() != 2 * window.length()) {
    throw ConfigError("feature buffer does not match window length");
  }
  std::size_t k = 0;
  for (const auto& pair : window.pairs()) {
    out[k++] = static_cast<Scalar>(normalize(pair.state.value, norm.state));
    out[k++] = static_cast<Scalar>(normalize(pair.action.value, norm.action));
  }
}

template void window_features<float>(const HistoryWindow&, const NormSpec&,
                                     std::span<float>);
template void window_features<double>(const HistoryWindow&, const NormSpec&,
                                      std::span<double>);

}  // namespace envi
