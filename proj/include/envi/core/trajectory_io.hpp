#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "envi/core/types.hpp"

namespace envi {

// Decimal rendering that round-trips exactly and always shows at least six
// significant digits ("50.0000", "48.4536123...").
std::string format_decimal(double value);
double parse_decimal(const std::string& text);

// `<stem>.meta.json` next to a trajectory CSV.
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

// CSV with header `tick,state,action` plus the metadata sidecar.
void write_trajectory(const std::filesystem::path& csv_path, const Trajectory& traj);
// Reads a CSV and, when present, its sidecar.
Trajectory read_trajectory(const std::filesystem::path& csv_path);

// All `*.csv` files of a directory in lexicographic order.
std::vector<std::filesystem::path> list_trajectory_files(
    const std::filesystem::path& dir);
std::vector<Trajectory> read_trajectory_dir(const std::filesystem::path& dir);

}  // namespace envi
