#pragma once

#include <span>

#include "envi/core/types.hpp"

namespace envi {

struct Range {
  double min = 0.0;
  double max = 1.0;
  friend bool operator==(Range, Range) = default;
};

// Affine maps from the state/action ranges onto [-1, +1].
struct NormSpec {
  Range state{kStateMin, kStateMax};
  Range action{-kActionLimit, kActionLimit};

  void validate() const;
  friend bool operator==(const NormSpec&, const NormSpec&) = default;
};

// Clamps `value` into `range` first, then maps it onto [-1, +1].
double normalize(double value, Range range);
// Inverse affine map; not clamped.
double denormalize(double value, Range range);

// Writes the interleaved normalized window [s0, a0, s1, a1, ...] into `out`,
// which must hold exactly 2 * window.length() values.
template <typename Scalar>
void window_features(const HistoryWindow& window, const NormSpec& norm,
                     std::span<Scalar> out);

}  // namespace envi
