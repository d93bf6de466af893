#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace ltc {

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace ltc
