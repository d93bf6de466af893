#include "ltc/curation_service.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <set>

#include "httplib.h"
#include "json.hpp"

namespace ltc {

using nlohmann::json;

struct CurationService::Http {
  httplib::Server server;
};

namespace {

CurationResponse error_response(int status, const std::string& code, const std::string& message) {
  return {status, json{{"error", code}, {"message", message}}.dump()};
}

std::string now_iso() {
  using namespace std::chrono;
  const auto t = system_clock::now();
  const auto secs = system_clock::to_time_t(t);
  const auto ms = duration_cast<milliseconds>(t.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03lldZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<long long>(ms));
  return buf;
}

}  // namespace

CurationService::CurationService(std::vector<CurationCluster> clusters, CurationOptions options)
    : clusters_(std::move(clusters)), options_(std::move(options)), http_(std::make_unique<Http>()) {
  if (options_.roster.empty()) throw Error("invalid_argument", "curation needs a non-empty expert roster");
  std::sort(clusters_.begin(), clusters_.end(),
            [](const CurationCluster& a, const CurationCluster& b) { return a.stats.cluster_id < b.stats.cluster_id; });
  if (!options_.votes_path.empty() && std::filesystem::exists(options_.votes_path))
    table_ = ingest_votes(read_votes_file(options_.votes_path), options_.roster, cluster_ids());
}

CurationService::~CurationService() { stop(); }

std::vector<int> CurationService::cluster_ids() const {
  std::vector<int> ids;
  for (const auto& c : clusters_) ids.push_back(c.stats.cluster_id);
  return ids;
}

CurationResponse CurationService::list_clusters(std::size_t offset, std::size_t limit,
                                                const std::string& expert) const {
  std::lock_guard lock(mu_);
  if (!expert.empty() &&
      std::find(options_.roster.begin(), options_.roster.end(), expert) == options_.roster.end())
    return error_response(400, "unknown_expert", "unknown expert: " + expert);
  json items = json::array();
  for (std::size_t i = offset; i < clusters_.size() && i < offset + limit; ++i) {
    const auto& c = clusters_[i];
    json j;
    j["cluster_id"] = c.stats.cluster_id;
    j["size"] = c.stats.size;
    j["sample_phrases"] = c.stats.sample_phrases;
    if (!options_.hide_stats)
      j["stats"] = {{"avg_propensity_rate", c.stats.avg_propensity_rate},
                    {"avg_relative_position", c.stats.avg_relative_position},
                    {"avg_sentence_length", c.stats.avg_sentence_length},
                    {"pct_past_tense", c.stats.pct_past_tense},
                    {"pct_with_sentiment", c.stats.pct_with_sentiment}};
    std::size_t accepts = 0, rejects = 0;
    for (const auto& e : options_.roster) {
      auto d = table_.decision(e, c.stats.cluster_id);
      if (!d) continue;
      (*d == Decision::kAccept ? accepts : rejects)++;
    }
    j["tally"] = {{"accept", accepts}, {"reject", rejects}};
    if (!expert.empty()) {
      auto d = table_.decision(expert, c.stats.cluster_id);
      j["my_vote"] = d ? json(*d == Decision::kAccept ? "accept" : "reject") : json(nullptr);
    }
    items.push_back(std::move(j));
  }
  return {200, json{{"total", clusters_.size()}, {"offset", offset}, {"limit", limit}, {"clusters", items}}.dump()};
}

CurationResponse CurationService::submit_vote(const std::string& body) {
  ExpertVote v;
  try {
    const auto j = json::parse(body);
    v.expert_id = j.at("expert_id").get<std::string>();
    v.cluster_id = j.at("cluster_id").get<int>();
    const auto d = j.at("decision").get<std::string>();
    if (d != "accept" && d != "reject") return error_response(400, "malformed", "decision must be accept or reject");
    v.decision = d == "accept" ? Decision::kAccept : Decision::kReject;
    v.timestamp = j.contains("timestamp") ? j.at("timestamp").get<std::string>() : now_iso();
    if (j.contains("note")) v.note = j.at("note").get<std::string>();
  } catch (const json::exception& e) {
    return error_response(400, "malformed", std::string("bad vote payload: ") + e.what());
  }
  std::lock_guard lock(mu_);
  try {
    VoteTable check = ingest_votes({v}, options_.roster, cluster_ids());
    (void)check;
  } catch (const Error& e) {
    return error_response(400, e.code(), e.what());
  }
  if (!options_.votes_path.empty()) append_vote(v, options_.votes_path);
  table_.record(v);
  const auto stored = *table_.decision(v.expert_id, v.cluster_id);
  return {200, json{{"expert_id", v.expert_id},
                    {"cluster_id", v.cluster_id},
                    {"decision", stored == Decision::kAccept ? "accept" : "reject"}}
                   .dump()};
}

CurationResponse CurationService::progress() const {
  std::lock_guard lock(mu_);
  const auto cov = vote_coverage(table_, options_.roster, cluster_ids());
  json experts = json::object();
  for (const auto& e : options_.roster) {
    std::size_t n = 0;
    for (const auto& c : clusters_)
      if (table_.decision(e, c.stats.cluster_id)) ++n;
    experts[e] = n;
  }
  return {200, json{{"total_clusters", clusters_.size()},
                    {"experts", experts},
                    {"votes", cov.present},
                    {"expected", cov.expected},
                    {"coverage", cov.coverage()},
                    {"uncovered_clusters", cov.uncovered_clusters}}
                   .dump()};
}

CurationResponse CurationService::finalize() {
  std::lock_guard lock(mu_);
  const auto ids = cluster_ids();
  const auto cov = vote_coverage(table_, options_.roster, ids);
  const auto selected = majority_select(table_, options_.roster, ids);
  std::vector<SelectedCluster> chosen;
  std::set<int> keep(selected.begin(), selected.end());
  for (const auto& c : clusters_)
    if (keep.count(c.stats.cluster_id)) chosen.push_back({c.stats.cluster_id, c.phrases, c.significant_products});
  Registry registry;
  try {
    registry = build_registry(std::move(chosen), options_.negation);
  } catch (const Error& e) {
    return error_response(409, e.code(), e.what());
  }
  if (!options_.registry_path.empty()) write_registry(registry, options_.registry_path);
  json out{{"selected", selected}, {"n_variables", registry.size()}, {"registry_hash", registry.hash()}};
  if (!cov.uncovered_clusters.empty())
    out["warning"] = {{"message", "votes missing; missing votes count as reject"},
                      {"uncovered_clusters", cov.uncovered_clusters}};
  return {200, out.dump()};
}

int CurationService::bind(int port) {
  auto& s = http_->server;
  auto reply = [](httplib::Response& res, const CurationResponse& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  s.Get("/api/clusters", [this, reply](const httplib::Request& req, httplib::Response& res) {
    std::size_t offset = 0, limit = 50;
    try {
      if (req.has_param("offset")) offset = std::stoull(req.get_param_value("offset"));
      if (req.has_param("limit")) limit = std::stoull(req.get_param_value("limit"));
    } catch (const std::exception&) {
      reply(res, error_response(400, "malformed", "offset and limit must be non-negative integers"));
      return;
    }
    reply(res, list_clusters(offset, limit, req.has_param("expert") ? req.get_param_value("expert") : ""));
  });
  s.Post("/api/votes",
         [this, reply](const httplib::Request& req, httplib::Response& res) { reply(res, submit_vote(req.body)); });
  s.Get("/api/progress", [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, progress()); });
  s.Post("/api/finalize", [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, finalize()); });
  if (!options_.static_dir.empty() && std::filesystem::is_directory(options_.static_dir)) {
    s.set_mount_point("/", options_.static_dir.string());
  } else {
    s.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("curation service is running; UI assets are not installed\n", "text/plain");
    });
  }
  s.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof yes);
  });
  int bound = port;
  if (port == 0) {
    bound = s.bind_to_any_port(options_.host);
  } else if (!s.bind_to_port(options_.host, port)) {
    bound = -1;
  }
  if (bound < 0) throw Error("port_busy", "cannot bind " + options_.host + ":" + std::to_string(port));
  return bound;
}

void CurationService::serve() { http_->server.listen_after_bind(); }

void CurationService::stop() {
  if (http_) http_->server.stop();
}

}  // namespace ltc
