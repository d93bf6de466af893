#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ltc/common.hpp"
#include "ltc/corpus.hpp"

namespace ltc {

enum class Decision { kAccept, kReject };

struct ExpertVote {
  std::string expert_id;
  int cluster_id = 0;
  Decision decision = Decision::kReject;
  std::string timestamp;  // ISO-8601; later wins
  std::string note;
};

class VoteTable {
 public:
  // Latest timestamp wins; equal timestamps resolve to the later call.
  void record(const ExpertVote& vote);
  std::optional<Decision> decision(const std::string& expert, int cluster) const;
  const std::map<std::pair<std::string, int>, ExpertVote>& votes() const { return votes_; }
  std::size_t size() const { return votes_.size(); }

 private:
  std::map<std::pair<std::string, int>, ExpertVote> votes_;
};

struct CoverageReport {
  std::size_t expected = 0;
  std::size_t present = 0;
  std::vector<std::pair<std::string, int>> missing;
  std::vector<int> uncovered_clusters;  // clusters missing at least one vote

  double coverage() const { return expected ? static_cast<double>(present) / static_cast<double>(expected) : 1.0; }
};

std::vector<ExpertVote> read_votes_file(const std::filesystem::path& path);
void write_votes_file(const std::vector<ExpertVote>& votes, const std::filesystem::path& path);
void append_vote(const ExpertVote& vote, const std::filesystem::path& path);

// Rejects unknown experts or clusters with an error naming them.
VoteTable ingest_votes(const std::vector<ExpertVote>& votes, const std::vector<std::string>& roster,
                       const std::vector<int>& cluster_ids, CoverageReport* coverage = nullptr);
CoverageReport vote_coverage(const VoteTable& table, const std::vector<std::string>& roster,
                             const std::vector<int>& cluster_ids);

// Selected iff accepts > rejects over the roster; a missing vote counts as reject.
std::vector<int> majority_select(const VoteTable& table, const std::vector<std::string>& roster,
                                 const std::vector<int>& cluster_ids);

enum class Polarity { kPositive, kNegated };

struct ContextualVariable {
  std::size_t variable_id = 0;
  int source_cluster_id = 0;
  std::vector<std::string> phrases;
  Polarity polarity = Polarity::kPositive;
  std::optional<std::size_t> paired_variable;
  std::vector<ProductId> significant_products;
};

struct NegationConfig {
  std::set<int> negated_clusters;
  std::vector<std::string> cues = {"not", "no", "never", "n't"};
  std::size_t window = 3;  // tokens preceding the phrase, same utterance
};

struct Registry {
  std::vector<ContextualVariable> variables;
  NegationConfig negation;

  std::size_t size() const { return variables.size(); }
  std::string canonical_json() const;
  std::string hash() const;  // sha256 of canonical_json()
};

struct SelectedCluster {
  int cluster_id = 0;
  std::vector<std::string> phrases;
  std::vector<ProductId> significant_products;
};

// One positive variable per cluster, plus a negated twin for clusters listed in
// negation.negated_clusters; ordered by cluster id, positive before negated.
Registry build_registry(std::vector<SelectedCluster> clusters, const NegationConfig& negation);

void write_registry(const Registry& registry, const std::filesystem::path& path);
Registry read_registry(const std::filesystem::path& path);

}  // namespace ltc
