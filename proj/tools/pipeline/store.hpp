#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ltc::cli {

struct StageRecord {
  std::map<std::string, std::string> inputs;   // alias -> sha256
  std::string config_hash;
  std::map<std::string, std::string> outputs;  // alias -> sha256
  std::string timestamp;
  std::string tool_version;
  std::vector<std::string> notes;
};

// Content-addressed artifact directory:
//   objects/<sha256>   immutable artifact bytes
//   <alias>            relative symlink to the object, e.g. registry.json
//   manifest.json      one StageRecord per stage
//   .lock              held for the lifetime of the store object
class ArtifactStore {
 public:
  explicit ArtifactStore(std::filesystem::path root);
  ~ArtifactStore();
  ArtifactStore(const ArtifactStore&) = delete;
  ArtifactStore& operator=(const ArtifactStore&) = delete;

  const std::filesystem::path& root() const { return root_; }

  bool has(const std::string& alias) const;
  // Resolved object path; throws missing_artifact.
  std::filesystem::path path(const std::string& alias) const;
  std::string hash(const std::string& alias) const;

  // Moves `file` into objects/ and points `alias` at it. Returns the hash.
  std::string put_file(const std::string& alias, const std::filesystem::path& file);
  std::string put_bytes(const std::string& alias, std::string_view bytes);

  // Scratch directory inside the store, emptied on creation.
  std::filesystem::path scratch(const std::string& name) const;

  std::optional<StageRecord> record(const std::string& stage) const;
  void set_record(const std::string& stage, const StageRecord& record);
  const std::map<std::string, StageRecord>& records() const { return records_; }

  // Aliases whose object is missing or whose bytes no longer hash to the
  // recorded value.
  std::vector<std::string> verify() const;

 private:
  void load_manifest();
  void save_manifest() const;

  std::filesystem::path root_;
  int lock_fd_ = -1;
  std::map<std::string, StageRecord> records_;
};

std::string utc_timestamp();

}  // namespace ltc::cli
