#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "ltc/clustering.hpp"
#include "ltc/corpus.hpp"
#include "ltc/text.hpp"

namespace ltc {

struct ClusterStats {
  int cluster_id = 0;
  std::size_t size = 0;                 // phrases in the cluster
  double avg_propensity_rate = 0.0;     // outcome-1 share over offers of containing dialogues
  double avg_relative_position = 0.0;   // utterance index / last index, per occurrence
  double avg_sentence_length = 0.0;     // words in the containing sentence
  double pct_past_tense = 0.0;
  double pct_with_sentiment = 0.0;
  std::size_t n_occurrences = 0;
  std::size_t n_dialogues = 0;
  std::vector<std::string> sample_phrases;  // up to 10
};

// Lexicon heuristics for the per-sentence flags.
struct Lexicons {
  std::set<std::string, std::less<>> past_tense_words;
  std::vector<std::string> past_tense_suffixes;
  std::size_t min_suffix_word_length = 4;
  std::set<std::string, std::less<>> sentiment_words;

  bool is_past_tense(std::string_view word) const;
  bool is_sentiment(std::string_view word) const;

  static Lexicons english();
};

// Statistics for every cluster of `assignment`; phrases[i] is labelled
// assignment.labels[i]. Noise phrases are ignored.
std::vector<ClusterStats> compute_cluster_stats(const ClusterAssignment& assignment,
                                                const std::vector<std::string>& phrases,
                                                const Corpus& corpus, const TokenizedCorpus& tokens,
                                                const Lexicons& lexicons = Lexicons::english());

// Single-cluster form.
ClusterStats cluster_stats(const std::vector<std::string>& cluster_phrases, const Corpus& corpus,
                           const TokenizedCorpus& tokens, const Lexicons& lexicons = Lexicons::english());

struct PruneThresholds {
  std::size_t min_size = 2;
  double min_rate_deviation = 0.0;  // |avg_propensity_rate - baseline|; 0 disables
  double max_past_tense = 1.0;      // 1 disables
};

struct PruneDecision {
  int cluster_id = 0;
  bool kept = true;
  std::string rule;  // violated rule, empty when kept
};

struct PruneResult {
  std::vector<int> kept;
  std::vector<PruneDecision> log;
};

PruneResult prune_clusters(const std::vector<ClusterStats>& stats, const PruneThresholds& thresholds,
                           double baseline_rate);

// Pooled outcome-1 share over all offers in the corpus.
double corpus_baseline_rate(const Corpus& corpus);

// Cluster report: one row per cluster with its statistics, prune verdict and
// sample phrases joined by " | ".
struct ClusterReportRow {
  ClusterStats stats;
  bool kept = true;
  std::string prune_rule;
};

void write_cluster_report(const std::vector<ClusterReportRow>& rows, const std::filesystem::path& path);
std::vector<ClusterReportRow> read_cluster_report(const std::filesystem::path& path);

// phrase \t label, in phrase order.
void write_cluster_assignment(const ClusterAssignment& a, const std::vector<std::string>& phrases,
                              const std::filesystem::path& path);
std::pair<ClusterAssignment, std::vector<std::string>> read_cluster_assignment(const std::filesystem::path& path);

}  // namespace ltc
