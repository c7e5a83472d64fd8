#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace envi::harness {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

// `checksums.json` of a directory: file name -> sha256.
using ChecksumMap = std::map<std::string, std::string>;

ChecksumMap read_checksums(const std::filesystem::path& dir);
void write_checksums(const std::filesystem::path& dir, const ChecksumMap& sums);
// True when `name` is listed and the file on disk still matches.
bool checksum_matches(const std::filesystem::path& dir, const ChecksumMap& sums,
                      const std::string& name);

}  // namespace envi::harness
