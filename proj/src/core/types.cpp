#include "envi/core/types.hpp"

#include <string>

#include "envi/core/error.hpp"

namespace envi {

std::string_view to_string(Origin origin) {
  return origin == Origin::kReal ? "real" : "virtual";
}

Origin parse_origin(std::string_view text) {
  if (text == "real") return Origin::kReal;
  if (text == "virtual") return Origin::kVirtual;
  throw ConfigError("unknown trajectory origin '" + std::string(text) + "'");
}

std::vector<double> Trajectory::states() const {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& pair : pairs) out.push_back(pair.state.value);
  return out;
}

HistoryWindow::HistoryWindow(std::vector<StateActionPair> pairs)
    : pairs_(std::move(pairs)) {
  if (pairs_.empty()) throw ConfigError("history window needs at least one pair");
}

HistoryWindow HistoryWindow::slid(const StateActionPair& next) const {
  std::vector<StateActionPair> shifted(pairs_.begin() + 1, pairs_.end());
  shifted.push_back(next);
  return HistoryWindow(std::move(shifted));
}

}  // namespace envi
