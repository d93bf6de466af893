#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "ltc/corpus.hpp"
#include "ltc/significance.hpp"
#include "ltc/text.hpp"

namespace ltc {

inline constexpr std::size_t kMaxPhraseLength = 4;

struct ProductCounts {
  std::size_t n_with = 0;  // dialogues offering the product and containing the phrase
  std::size_t k_with = 0;  // ... of which outcome == 1
  double z_stat = 0.0;
  double p_value = 1.0;
  bool tested = false;
};

struct PhraseCandidate {
  std::array<TokenId, kMaxPhraseLength> ids{};
  std::uint8_t length = 0;
  std::size_t support = 0;  // distinct dialogues
  // Indexed like CandidateSet::products; empty until count_product_outcomes.
  std::vector<ProductCounts> per_product;
  std::vector<std::size_t> significant_products;  // indices into CandidateSet::products
};

struct CandidateSet {
  std::shared_ptr<const Vocabulary> vocab;
  std::vector<ProductId> products;
  std::vector<PhraseCandidate> items;

  std::string text(const PhraseCandidate& c) const;
  std::vector<std::string> texts() const;
  std::size_t size() const { return items.size(); }
};

struct CandidateOptions {
  std::size_t max_len = kMaxPhraseLength;
  bool drop_stop_phrases = true;  // n-grams made only of stopwords
};

// Every contiguous n-gram (1..max_len) of customer turns, with support counted
// once per dialogue. Items are ordered by token-id sequence.
CandidateSet generate_candidates(const Corpus& corpus, const TokenizedCorpus& tokens,
                                 const CandidateOptions& options = {});

CandidateSet filter_by_support(const CandidateSet& candidates, std::size_t min_dialogues = 50);

// Fills per_product n_with / k_with for every catalog product.
void count_product_outcomes(CandidateSet& candidates, const Corpus& corpus,
                            const TokenizedCorpus& tokens);

struct ProductBaseline {
  std::size_t n = 0;  // dialogues offering the product
  std::size_t k = 0;  // ... with outcome 1
};

std::vector<ProductBaseline> product_baselines(const Corpus& corpus,
                                               const std::vector<ProductId>& products);

// Compares the outcome rate of dialogues offering `product` that contain the
// phrase against all dialogues offering `product`.
SignificanceResult significance_test(const CandidateSet& candidates, const PhraseCandidate& phrase,
                                     std::size_t product_index, const ProductBaseline& baseline);
SignificanceResult significance_test(const CandidateSet& candidates, const PhraseCandidate& phrase,
                                     const ProductId& product, const Corpus& corpus);

struct SignificanceOptions {
  double alpha = 0.01;
  bool bonferroni = false;
};

// Tests every (candidate, product) pair with co-occurrence and keeps the
// candidates significant for at least one of `products` (all if empty).
CandidateSet select_significant(CandidateSet candidates, const Corpus& corpus,
                                const SignificanceOptions& options = {},
                                const std::vector<ProductId>& products = {});

// Delimited table: phrase, support, then <product>_n/_k/_z/_p per product.
void write_candidate_table(const CandidateSet& candidates, const std::filesystem::path& path);

struct CandidateRow {
  std::string phrase;
  std::size_t support = 0;
  std::vector<ProductCounts> per_product;
  std::vector<ProductId> significant_products;
};

struct CandidateTable {
  std::vector<ProductId> products;
  std::vector<CandidateRow> rows;
};

CandidateTable read_candidate_table(const std::filesystem::path& path);

}  // namespace ltc
