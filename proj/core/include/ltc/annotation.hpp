#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ltc/corpus.hpp"
#include "ltc/registry.hpp"

namespace ltc {

struct ContextVector {
  std::string dialogue_id;
  std::vector<std::uint8_t> values;  // indexed by variable_id
};

// Matches registry phrases against customer turns. Immutable once built and
// safe to share between threads.
class Annotator {
 public:
  explicit Annotator(const Registry& registry);

  // Sorted ids of the variables set in `d`.
  std::vector<std::uint32_t> active_variables(const Dialogue& d) const;
  ContextVector annotate(const Dialogue& d) const;
  std::size_t n_variables() const { return n_variables_; }

 private:
  struct Pattern {
    std::vector<std::uint32_t> ids;
    std::uint32_t positive = 0;
    std::int64_t negated = -1;  // twin variable, -1 when the cluster has none
  };

  std::vector<std::uint32_t> encode(const std::vector<std::string>& words) const;
  bool is_cue(const std::string& word) const;

  std::size_t n_variables_ = 0;
  std::unordered_map<std::string, std::uint32_t> words_;
  std::unordered_map<std::uint32_t, std::vector<Pattern>> by_first_;
  std::vector<std::string> cues_;
  std::size_t window_ = 3;
};

// An occurrence preceded within the negation window by a cue sets the negated
// twin instead of the positive variable, or nothing when there is no twin.
ContextVector annotate_dialogue(const Dialogue& d, const Registry& registry);

// Sparse per-dialogue annotation of a whole corpus, in corpus order.
struct Annotations {
  std::size_t n_variables = 0;
  std::string registry_hash;
  std::vector<std::string> dialogue_ids;
  std::vector<std::vector<std::uint32_t>> active;  // sorted variable ids

  ContextVector dense(std::size_t i) const;
  std::unordered_map<std::string, std::size_t> index() const;
};

Annotations annotate_corpus(const Corpus& corpus, const Registry& registry);

// "# registry_hash=<h> n_variables=<n>" then dialogue_id \t comma-separated ids.
void write_annotations(const Annotations& a, const std::filesystem::path& path);
Annotations read_annotations(const std::filesystem::path& path);

// Share of dialogues offering each catalog product with at least one nonzero
// context value, in catalog order.
std::vector<std::pair<ProductId, double>> context_coverage(const Corpus& corpus, const Annotations& annotations);
std::vector<std::pair<ProductId, double>> context_coverage(const Corpus& corpus, const Registry& registry);

}  // namespace ltc
