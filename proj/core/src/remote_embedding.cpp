#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "ltc/embedding.hpp"

namespace ltc {

RemoteEmbeddingProvider::RemoteEmbeddingProvider(RemoteEmbeddingOptions options)
    : options_(std::move(options)) {}

std::string RemoteEmbeddingProvider::id() const {
  std::ostringstream os;
  os << "remote-" << options_.host << ':' << options_.port << options_.path;
  return os.str();
}

std::vector<std::vector<double>> RemoteEmbeddingProvider::embed(const std::vector<std::string>& phrases) {
  httplib::Client client(options_.host, options_.port);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  const std::string body = nlohmann::json{{"phrases", phrases}}.dump();

  std::string last_error;
  auto backoff = options_.initial_backoff;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    auto res = client.Post(options_.path, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "server status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw Error("protocol", "embedding service answered " + std::to_string(res->status) + ": " + res->body);
    auto j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("vectors") || !j["vectors"].is_array())
      throw Error("protocol", "embedding service returned malformed body");
    std::vector<std::vector<double>> out;
    for (const auto& v : j["vectors"]) out.push_back(v.get<std::vector<double>>());
    if (out.size() != phrases.size())
      throw Error("protocol", "embedding service returned " + std::to_string(out.size()) +
                                  " vectors for " + std::to_string(phrases.size()) + " phrases");
    for (const auto& v : out) {
      const std::size_t want = options_.expected_dimension ? options_.expected_dimension : out.front().size();
      if (v.size() != want) throw Error("dimension_mismatch", "embedding service returned mixed dimensions");
    }
    return out;
  }
  std::string listed;
  for (std::size_t i = 0; i < phrases.size(); ++i) listed += (i ? ", " : "") + phrases[i];
  throw Error("unreachable", "embedding service " + id() + " failed after " +
                                 std::to_string(options_.max_retries + 1) + " attempts (" + last_error +
                                 "); missing phrases: " + listed);
}

}  // namespace ltc
