#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ltc::cli {

// Flat view of the INI config: "section.key" -> value. Every known key has a
// default; unknown keys are rejected so typos do not pass silently.
class Config {
 public:
  static Config defaults();
  static Config load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  const std::string& str(const std::string& key) const;
  double real(const std::string& key) const;
  long long integer(const std::string& key) const;
  std::size_t size(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<std::string> list(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;

  // "key=value" lines of the given sections, sorted; the hashing input.
  std::string canonical(const std::vector<std::string>& sections) const;
  std::string to_ini() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace ltc::cli
