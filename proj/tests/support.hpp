#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "envi/core/types.hpp"

namespace envi::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("envi_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline Trajectory make_trajectory(const std::vector<double>& states, double action = 30.0) {
  Trajectory t;
  for (double s : states) t.pairs.push_back({State{s}, Action{s > 50 ? action : -action}});
  return t;
}

inline Trajectory random_trajectory(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> state(0.0, 100.0);
  std::uniform_real_distribution<double> action(-90.0, 90.0);
  Trajectory t;
  for (std::size_t i = 0; i < n; ++i) t.pairs.push_back({State{state(rng)}, Action{action(rng)}});
  return t;
}

}  // namespace envi::testing
