#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "envi/core/normalization.hpp"
#include "envi/core/types.hpp"

namespace envi {

// One supervised example: a normalized window (interleaved states/actions)
// and the normalized state that followed it.
struct Sample {
  std::vector<double> input;
  double target = 0.0;
  std::size_t source_log = 0;
  // Index of the first window pair inside the source log.
  std::size_t offset = 0;
};

// Samples of one source log, in log order.
struct SampleGroup {
  std::size_t source_log = 0;
  double controller_x = 0.0;
  std::span<const Sample> samples;
};

struct Dataset {
  std::vector<Sample> samples;
  NormSpec norm;
  std::size_t history_length = 0;
  // Controller parameter of each source log, keyed by position in `source_logs`.
  std::vector<std::size_t> source_logs;
  std::vector<double> source_controller_x;
  // Logs that were skipped, one message each.
  std::vector<std::string> warnings;

  std::size_t feature_dim() const { return 2 * history_length; }
  std::vector<SampleGroup> groups() const;
};

// Sliding-window dataset: a log of T+1 pairs yields T-l+1 samples. Logs
// shorter than l+1 are skipped with a warning. `log_ids` (optional, same
// length as `logs`) names each log; defaults to its position.
Dataset make_dataset(std::span<const Trajectory> logs, std::size_t history_length,
                     const NormSpec& norm,
                     std::span<const std::size_t> log_ids = {});

}  // namespace envi
