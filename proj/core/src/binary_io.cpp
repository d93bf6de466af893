#include "ltc/binary_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "ltc/common.hpp"

namespace ltc {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put_le(std::ostream& out, T v) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) throw Error("malformed", "truncated binary file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace

void write_f32_le(const std::filesystem::path& path, std::span<const double> values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("unwritable", "cannot write " + path.string());
  for (double v : values) put_le<float>(out, static_cast<float>(v));
}

std::vector<double> read_f32_le(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("unreadable", "cannot read " + path.string());
  const auto size = std::filesystem::file_size(path);
  if (size % 4 != 0) throw Error("malformed", "float32 file size not a multiple of 4: " + path.string());
  std::vector<double> out(size / 4);
  for (auto& v : out) v = get_le<float>(in);
  return out;
}

std::map<std::string, std::size_t> KeyedVectors::index() const {
  std::map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < keys.size(); ++i) out.emplace(keys[i], i);
  return out;
}

void write_keyed_vectors(const std::filesystem::path& path, const KeyedVectors& kv) {
  if (kv.keys.size() != kv.vectors.size()) throw Error("invalid_argument", "keys/vectors size mismatch");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("unwritable", "cannot write " + path.string());
  out.write("LTCV", 4);
  put_le<std::uint32_t>(out, 1);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(kv.dim));
  put_le<std::uint64_t>(out, kv.keys.size());
  for (std::size_t i = 0; i < kv.keys.size(); ++i) {
    if (kv.vectors[i].size() != kv.dim) throw Error("dimension_mismatch", "vector for '" + kv.keys[i] + "' has wrong dimension");
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(kv.keys[i].size()));
    out.write(kv.keys[i].data(), static_cast<std::streamsize>(kv.keys[i].size()));
    for (double v : kv.vectors[i]) put_le<float>(out, static_cast<float>(v));
  }
}

KeyedVectors read_keyed_vectors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("unreadable", "cannot read " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "LTCV", 4) != 0)
    throw Error("malformed", "not a keyed vector file: " + path.string());
  if (get_le<std::uint32_t>(in) != 1) throw Error("malformed", "unsupported keyed vector version");
  KeyedVectors kv;
  kv.dim = get_le<std::uint32_t>(in);
  const auto count = get_le<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto len = get_le<std::uint32_t>(in);
    std::string key(len, '\0');
    if (!in.read(key.data(), len)) throw Error("malformed", "truncated key");
    std::vector<double> v(kv.dim);
    for (auto& x : v) x = get_le<float>(in);
    kv.keys.push_back(std::move(key));
    kv.vectors.push_back(std::move(v));
  }
  return kv;
}

}  // namespace ltc
