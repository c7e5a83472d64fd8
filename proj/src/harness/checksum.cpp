#include "envi/harness/checksum.hpp"

#include <array>
#include <fstream>
#include <memory>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "envi/core/error.hpp"

namespace envi::harness {
namespace {

constexpr const char* kChecksumFile = "checksums.json";

using DigestCtx = std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)>;

DigestCtx new_digest() {
  DigestCtx ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw IoError("sha256 initialisation failed");
  }
  return ctx;
}

std::string finish(EVP_MD_CTX* ctx) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx, digest.data(), &len) != 1) throw IoError("sha256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  auto ctx = new_digest();
  EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size());
  return finish(ctx.get());
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  auto ctx = new_digest();
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return finish(ctx.get());
}

ChecksumMap read_checksums(const std::filesystem::path& dir) {
  std::ifstream in(dir / kChecksumFile);
  if (!in) return {};
  try {
    return nlohmann::json::parse(in).get<ChecksumMap>();
  } catch (const nlohmann::json::exception&) {
    return {};  // a torn write; every artifact will be recomputed
  }
}

void write_checksums(const std::filesystem::path& dir, const ChecksumMap& sums) {
  const auto tmp = dir / (std::string(kChecksumFile) + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << nlohmann::json(sums).dump(2) << '\n';
  }
  std::filesystem::rename(tmp, dir / kChecksumFile);
}

bool checksum_matches(const std::filesystem::path& dir, const ChecksumMap& sums,
                      const std::string& name) {
  const auto it = sums.find(name);
  if (it == sums.end() || !std::filesystem::exists(dir / name)) return false;
  return sha256_file(dir / name) == it->second;
}

}  // namespace envi::harness
