#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ltc/common.hpp"

namespace ltc {

enum class Speaker { kCustomer, kManager };

std::string_view to_string(Speaker s);
std::optional<Speaker> parse_speaker(std::string_view s);

struct Utterance {
  Speaker speaker = Speaker::kCustomer;
  std::string text;
  std::size_t index = 0;
};

struct OfferRecord {
  ProductId product_id;
  int outcome = 0;  // 1 = customer expressed propensity to purchase
};

struct Dialogue {
  std::string dialogue_id;
  std::string customer_id;
  std::vector<Utterance> utterances;
  std::vector<OfferRecord> offers;
  std::optional<std::string> timestamp;  // ISO-8601 calendar date

  std::size_t customer_line_count() const;
  // Outcome for `product`, or nullopt when the product was not offered.
  std::optional<int> outcome_for(std::string_view product) const;
};

struct Corpus {
  std::vector<Dialogue> dialogues;
  std::vector<ProductId> product_catalog;
};

struct CleaningReport {
  std::size_t input_size = 0;
  std::size_t output_size = 0;
  std::size_t dropped_too_short = 0;
  std::size_t dropped_contradictory = 0;
  std::size_t merged_repeat_calls = 0;
  std::size_t dropped_conflicting_repeats = 0;
  // Offer-level detail; not part of the dialogue conservation law.
  std::size_t offers_merged = 0;
  std::size_t offers_dropped_conflicting = 0;
  std::size_t duplicate_offers_collapsed = 0;

  std::string to_key_value() const;
  static CleaningReport from_key_value(std::string_view text);
};

struct CleaningOptions {
  std::size_t min_customer_lines = 2;
  // When a repeat call collapses into a later one, prepend its transcript.
  bool concatenate_repeat_transcripts = false;
};

enum class CorpusFormat { kJsonLines };

CorpusFormat parse_corpus_format(std::string_view tag);

struct LoadOptions {
  // Where malformed records go; empty = "<input>.rejects.jsonl".
  std::filesystem::path rejects_path;
  // Overrides any catalog header in the file.
  std::optional<std::vector<ProductId>> product_catalog;
  std::size_t max_offers_per_dialogue = 3;
};

struct LoadSummary {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t over_offer_limit = 0;
  std::filesystem::path rejects_path;
};

// Line-delimited JSON, one dialogue per line. An optional first line of the
// form {"product_catalog": [...]} declares the catalog; otherwise it is the
// sorted set of offered product ids.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   const LoadOptions& options = {}, LoadSummary* summary = nullptr);

void write_corpus(const Corpus& corpus, const std::filesystem::path& path);
std::string serialize_dialogue(const Dialogue& d);

std::pair<Corpus, CleaningReport> clean_corpus(const Corpus& corpus,
                                               const CleaningOptions& options = {});

struct ProductStats {
  ProductId product_id;
  std::size_t n_dialogues = 0;
  std::optional<double> propensity_rate;  // null when n_dialogues == 0
};

std::vector<ProductStats> corpus_stats(const Corpus& corpus);
std::string product_stats_to_tsv(const std::vector<ProductStats>& stats);

}  // namespace ltc
