#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace ltc {

// Raw little-endian float32 array (no header).
void write_f32_le(const std::filesystem::path& path, std::span<const double> values);
std::vector<double> read_f32_le(const std::filesystem::path& path);

// Keyed vector file: "LTCV", u32 version, u32 dim, u64 count, then per record
// u32 key length, key bytes, dim x float32. All integers little-endian.
struct KeyedVectors {
  std::size_t dim = 0;
  std::vector<std::string> keys;
  std::vector<std::vector<double>> vectors;

  std::map<std::string, std::size_t> index() const;
};

void write_keyed_vectors(const std::filesystem::path& path, const KeyedVectors& kv);
KeyedVectors read_keyed_vectors(const std::filesystem::path& path);

}  // namespace ltc
