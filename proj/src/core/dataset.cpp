#include "envi/core/dataset.hpp"

#include <algorithm>

#include "envi/core/error.hpp"

namespace envi {

std::vector<SampleGroup> Dataset::groups() const {
  std::vector<SampleGroup> out;
  std::size_t begin = 0;
  while (begin < samples.size()) {
    std::size_t end = begin;
    while (end < samples.size() &&
           samples[end].source_log == samples[begin].source_log) {
      ++end;
    }
    const auto id = samples[begin].source_log;
    const auto it = std::find(source_logs.begin(), source_logs.end(), id);
    const double x = it == source_logs.end()
                         ? 0.0
                         : source_controller_x[static_cast<std::size_t>(
                               it - source_logs.begin())];
    out.push_back({id, x, std::span<const Sample>(samples).subspan(begin, end - begin)});
    begin = end;
  }
  return out;
}

Dataset make_dataset(std::span<const Trajectory> logs, std::size_t history_length,
                     const NormSpec& norm, std::span<const std::size_t> log_ids) {
  if (history_length == 0) throw ConfigError("history length must be positive");
  if (!log_ids.empty() && log_ids.size() != logs.size()) {
    throw ConfigError("log id list does not match log list");
  }
  norm.validate();

  Dataset data;
  data.norm = norm;
  data.history_length = history_length;
  const std::size_t l = history_length;

  for (std::size_t i = 0; i < logs.size(); ++i) {
    const Trajectory& log = logs[i];
    const std::size_t id = log_ids.empty() ? i : log_ids[i];
    if (log.size() < l + 1) {
      data.warnings.push_back("log " + std::to_string(id) + " has " +
                              std::to_string(log.size()) +
                              " pairs, needs at least " + std::to_string(l + 1) +
                              "; skipped");
      continue;
    }
    data.source_logs.push_back(id);
    data.source_controller_x.push_back(log.meta.controller_x);
    for (std::size_t j = 0; j + l < log.size(); ++j) {
      Sample sample;
      sample.source_log = id;
      sample.offset = j;
      sample.input.reserve(2 * l);
      for (std::size_t k = j; k < j + l; ++k) {
        sample.input.push_back(normalize(log.pairs[k].state.value, norm.state));
        sample.input.push_back(normalize(log.pairs[k].action.value, norm.action));
      }
      sample.target = normalize(log.pairs[j + l].state.value, norm.state);
      data.samples.push_back(std::move(sample));
    }
  }
  if (data.samples.empty()) throw ConfigError("dataset is empty: no usable logs");
  return data;
}

}  // namespace envi
