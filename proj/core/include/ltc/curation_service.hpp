#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "ltc/cluster_stats.hpp"
#include "ltc/registry.hpp"

namespace ltc {

struct CurationCluster {
  ClusterStats stats;
  std::vector<std::string> phrases;
  std::vector<ProductId> significant_products;
};

struct CurationOptions {
  std::vector<std::string> roster;
  std::filesystem::path votes_path;     // appended on every vote; loaded at start
  std::filesystem::path registry_path;  // written by finalize when non-empty
  std::filesystem::path static_dir;     // UI assets, optional
  NegationConfig negation;
  bool hide_stats = false;
  std::string host = "127.0.0.1";
};

struct CurationResponse {
  int status = 200;
  std::string body;  // JSON
};

// Request handlers are usable directly; bind() + serve() expose them over HTTP:
//   GET  /api/clusters?offset=&limit=&expert=
//   POST /api/votes     {"expert_id", "cluster_id", "decision", ["timestamp"], ["note"]}
//   GET  /api/progress
//   POST /api/finalize
class CurationService {
 public:
  CurationService(std::vector<CurationCluster> clusters, CurationOptions options);
  ~CurationService();

  CurationResponse list_clusters(std::size_t offset, std::size_t limit, const std::string& expert = {}) const;
  CurationResponse submit_vote(const std::string& body);
  CurationResponse progress() const;
  CurationResponse finalize();

  const VoteTable& votes() const { return table_; }
  std::vector<int> cluster_ids() const;

  // Port 0 picks a free port; returns the bound port.
  int bind(int port);
  void serve();  // blocks until stop()
  void stop();

 private:
  struct Http;

  std::vector<CurationCluster> clusters_;
  CurationOptions options_;
  mutable std::mutex mu_;
  VoteTable table_;
  std::unique_ptr<Http> http_;
};

}  // namespace ltc
