#pragma once

#include <cstdint>
#include <string_view>

namespace envi {

// Child seed for a named sub-stream: splitmix64(parent ^ fnv1a64(label)).
// Every random stream in an experiment is derived this way from one root,
// e.g. root -> "version/30" -> "train-pool".
std::uint64_t derive_seed(std::uint64_t parent, std::string_view label);
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

}  // namespace envi
