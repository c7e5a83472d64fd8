#include "envi/core/trajectory_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "envi/core/error.hpp"

namespace envi {
namespace fs = std::filesystem;

std::string format_decimal(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  std::string text(buf, res.ptr);
  if (text.find_first_of("eEn") != std::string::npos) return text;  // exp/nan/inf

  std::size_t digits = 0;
  bool leading = true;
  for (char ch : text) {
    if (ch < '0' || ch > '9') continue;
    if (leading && ch == '0') continue;
    leading = false;
    ++digits;
  }
  if (digits == 0) digits = 1;  // the value is zero
  if (digits >= 6) return text;
  if (text.find('.') == std::string::npos) text += '.';
  text.append(6 - digits, '0');
  return text;
}

double parse_decimal(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ConfigError("not a decimal number: '" + text + "'");
  }
  return value;
}

fs::path sidecar_path(const fs::path& csv_path) {
  fs::path out = csv_path;
  out.replace_extension(".meta.json");
  return out;
}

void write_trajectory(const fs::path& csv_path, const Trajectory& traj) {
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw IoError("cannot write " + csv_path.string());
  csv << "tick,state,action\n";
  for (std::size_t t = 0; t < traj.pairs.size(); ++t) {
    csv << t << ',' << format_decimal(traj.pairs[t].state.value) << ','
        << format_decimal(traj.pairs[t].action.value) << '\n';
  }
  if (!csv) throw IoError("failed writing " + csv_path.string());

  const nlohmann::ordered_json meta = {
      {"controller_x", traj.meta.controller_x},
      {"seed", traj.meta.seed},
      {"tick_rate", traj.tick_rate},
      {"origin", std::string(to_string(traj.meta.origin))},
      {"clamp_count", traj.meta.clamp_count},
  };
  std::ofstream side(sidecar_path(csv_path), std::ios::binary);
  if (!side) throw IoError("cannot write " + sidecar_path(csv_path).string());
  side << meta.dump(2) << '\n';
}

Trajectory read_trajectory(const fs::path& csv_path) {
  std::ifstream csv(csv_path);
  if (!csv) throw IoError("cannot read " + csv_path.string());
  std::string line;
  if (!std::getline(csv, line) || line != "tick,state,action") {
    throw ConfigError(csv_path.string() + ": expected header 'tick,state,action'");
  }
  Trajectory traj;
  std::size_t expected_tick = 0;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string tick, state, action;
    if (!std::getline(row, tick, ',') || !std::getline(row, state, ',') ||
        !std::getline(row, action)) {
      throw ConfigError(csv_path.string() + ": malformed row '" + line + "'");
    }
    if (parse_decimal(tick) != static_cast<double>(expected_tick)) {
      throw ConfigError(csv_path.string() + ": ticks must count up from 0");
    }
    ++expected_tick;
    traj.pairs.push_back({State{parse_decimal(state)}, Action{parse_decimal(action)}});
  }

  const fs::path side = sidecar_path(csv_path);
  if (fs::exists(side)) {
    std::ifstream in(side);
    try {
      const auto meta = nlohmann::json::parse(in);
      traj.meta.controller_x = meta.value("controller_x", 0.0);
      traj.meta.seed = meta.value("seed", std::uint64_t{0});
      traj.tick_rate = meta.value("tick_rate", kDefaultTickRate);
      traj.meta.origin = parse_origin(meta.value("origin", std::string("real")));
      traj.meta.clamp_count = meta.value("clamp_count", std::size_t{0});
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(side.string() + ": " + e.what());
    }
    if (!(traj.tick_rate > 0.0)) throw ConfigError(side.string() + ": tick_rate must be > 0");
  }
  return traj;
}

std::vector<fs::path> list_trajectory_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<Trajectory> read_trajectory_dir(const fs::path& dir) {
  std::vector<Trajectory> out;
  for (const auto& file : list_trajectory_files(dir)) out.push_back(read_trajectory(file));
  return out;
}

}  // namespace envi
