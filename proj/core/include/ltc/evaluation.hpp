#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ltc/annotation.hpp"
#include "ltc/corpus.hpp"

namespace ltc {

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

Confusion confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred);

// 0 when precision and recall are both undefined.
double f1_score(const std::vector<int>& y_true, const std::vector<int>& y_pred);

// Mann-Whitney AUC with half credit for ties.
double roc_auc(const std::vector<int>& y_true, const std::vector<double>& scores);

std::vector<int> threshold_scores(const std::vector<double>& scores, double threshold);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single value
};
MeanStd mean_std(const std::vector<double>& values);

// Stratified k-fold split: each class is shuffled with the seed and dealt
// round-robin, the fold pointer carrying over between classes.
std::vector<std::vector<std::size_t>> kfold_split(const std::vector<int>& labels, std::size_t k, std::uint64_t seed);
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);

// sha256 over the fold index of every row.
std::string fold_hash(const std::vector<std::vector<std::size_t>>& folds, std::size_t n);

enum class RankCriterion { kFrequency, kRate };

std::string to_string(RankCriterion c);
RankCriterion parse_criterion(const std::string& s);

struct RankedVariable {
  std::uint32_t variable_id = 0;
  double score = 0.0;
  std::size_t frequency = 0;    // offering dialogues with the variable and outcome 1
  std::size_t co_occurring = 0;  // offering dialogues with the variable
  bool low_support = false;      // rate criterion only
};

struct VariableRanking {
  ProductId product;
  RankCriterion criterion = RankCriterion::kFrequency;
  std::vector<RankedVariable> entries;
  std::vector<std::uint32_t> excluded;  // rate undefined (no co-occurrence)

  std::vector<std::uint32_t> ids() const;
};

struct RankOptions {
  std::size_t rate_min_support = 20;
};

// Frequency ties break by rate then id; rate ties by frequency then id.
// Variables below rate_min_support rank after all others under the rate criterion.
VariableRanking rank_variables(const Corpus& corpus, const Annotations& annotations, const ProductId& product,
                               RankCriterion criterion, const RankOptions& options = {});

// First floor(q * N / 100) ranked variables.
std::vector<std::uint32_t> select_quantile(const VariableRanking& ranking, double q);
std::size_t quantile_count(std::size_t n, double q);

}  // namespace ltc
