#include "store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <chrono>
#include <ctime>
#include <fstream>

#include "json.hpp"
#include "ltc/common.hpp"
#include "ltc/hashing.hpp"

namespace ltc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[80];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

ArtifactStore::ArtifactStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_ / "objects", ec);
  if (ec) throw Error("unwritable", "cannot create store " + root_.string() + ": " + ec.message());
  lock_fd_ = ::open((root_ / ".lock").c_str(), O_CREAT | O_RDWR, 0644);
  if (lock_fd_ < 0) throw Error("unwritable", "cannot open lock file in " + root_.string());
  if (::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(lock_fd_);
    lock_fd_ = -1;
    throw Error("store_locked", "another run holds the lock on " + root_.string());
  }
  load_manifest();
}

ArtifactStore::~ArtifactStore() {
  if (lock_fd_ >= 0) {
    ::flock(lock_fd_, LOCK_UN);
    ::close(lock_fd_);
  }
}

bool ArtifactStore::has(const std::string& alias) const {
  std::error_code ec;
  return fs::is_symlink(root_ / alias, ec) && fs::exists(root_ / alias, ec);
}

fs::path ArtifactStore::path(const std::string& alias) const {
  if (!has(alias)) throw Error("missing_artifact", "missing artifact: " + alias);
  return fs::canonical(root_ / alias);
}

std::string ArtifactStore::hash(const std::string& alias) const { return path(alias).filename().string(); }

std::string ArtifactStore::put_file(const std::string& alias, const fs::path& file) {
  const std::string h = sha256_file(file);
  const fs::path object = root_ / "objects" / h;
  std::error_code ec;
  if (fs::exists(object, ec)) {
    fs::remove(file, ec);
  } else {
    fs::rename(file, object, ec);
    if (ec) {
      fs::copy_file(file, object, fs::copy_options::overwrite_existing);
      fs::remove(file, ec);
    }
  }
  const fs::path link = root_ / alias;
  fs::create_directories(link.parent_path());
  const fs::path tmp = link.parent_path() / ("." + link.filename().string() + ".tmp");
  fs::remove(tmp, ec);
  fs::create_symlink(fs::relative(object, link.parent_path()), tmp);
  fs::rename(tmp, link);
  return h;
}

std::string ArtifactStore::put_bytes(const std::string& alias, std::string_view bytes) {
  const fs::path tmp = scratch("put") / "blob";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("unwritable", "cannot write " + tmp.string());
  }
  return put_file(alias, tmp);
}

fs::path ArtifactStore::scratch(const std::string& name) const {
  const fs::path dir = root_ / "tmp" / name;
  std::error_code ec;
  fs::remove_all(dir, ec);
  fs::create_directories(dir);
  return dir;
}

std::optional<StageRecord> ArtifactStore::record(const std::string& stage) const {
  auto it = records_.find(stage);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

void ArtifactStore::set_record(const std::string& stage, const StageRecord& record) {
  records_[stage] = record;
  save_manifest();
}

std::vector<std::string> ArtifactStore::verify() const {
  std::vector<std::string> bad;
  for (const auto& [stage, rec] : records_)
    for (const auto& [alias, h] : rec.outputs) {
      const fs::path object = root_ / "objects" / h;
      if (!fs::exists(object) || sha256_file(object) != h) bad.push_back(alias);
    }
  return bad;
}

void ArtifactStore::load_manifest() {
  const fs::path p = root_ / "manifest.json";
  if (!fs::exists(p)) return;
  std::ifstream in(p);
  json j;
  try {
    in >> j;
    for (const auto& [stage, r] : j.at("stages").items()) {
      StageRecord rec;
      rec.inputs = r.at("inputs").get<std::map<std::string, std::string>>();
      rec.config_hash = r.at("config_hash").get<std::string>();
      rec.outputs = r.at("outputs").get<std::map<std::string, std::string>>();
      rec.timestamp = r.at("timestamp").get<std::string>();
      rec.tool_version = r.at("tool_version").get<std::string>();
      if (r.contains("notes")) rec.notes = r.at("notes").get<std::vector<std::string>>();
      records_[stage] = std::move(rec);
    }
  } catch (const json::exception& e) {
    throw Error("malformed", "corrupt manifest " + p.string() + ": " + e.what());
  }
}

void ArtifactStore::save_manifest() const {
  json stages = json::object();
  for (const auto& [stage, r] : records_) {
    json e = {{"inputs", r.inputs},
              {"config_hash", r.config_hash},
              {"outputs", r.outputs},
              {"timestamp", r.timestamp},
              {"tool_version", r.tool_version}};
    if (!r.notes.empty()) e["notes"] = r.notes;
    stages[stage] = std::move(e);
  }
  const fs::path tmp = root_ / "manifest.json.tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << json{{"stages", stages}}.dump(2) << '\n';
    if (!out) throw Error("unwritable", "cannot write manifest");
  }
  fs::rename(tmp, root_ / "manifest.json");
}

}  // namespace ltc::cli
