#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ltc/evaluation.hpp"
#include "ltc/features.hpp"
#include "ltc/models.hpp"

namespace ltc {

struct SweepConfig {
  RankCriterion criterion = RankCriterion::kFrequency;
  ModelSpec model;
  std::vector<double> q_list = {0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  std::size_t folds = 10;
  std::uint64_t seed = 42;
  double threshold = 0.5;
  // Used when model.kind is auto: candidates are compared per q by inner CV
  // over all rows, then the winner is scored by the outer folds.
  std::vector<ModelSpec> auto_candidates = default_auto_candidates();
  std::size_t auto_cv_folds = 3;
};

struct SweepRow {
  double q = 0.0;
  std::size_t n_variables = 0;
  MeanStd f1;
  MeanStd auc;
  double f1_impr_pct = 0.0;  // vs q = 0, from unrounded means
  double auc_impr_pct = 0.0;
  std::vector<double> f1_folds;
  std::vector<double> auc_folds;
  std::size_t failed_folds = 0;
  std::string model_detail;  // fitted spec; the auto winner for auto
};

struct EvalReport {
  ProductId product;
  RankCriterion criterion = RankCriterion::kFrequency;
  std::string model;  // kind label, "auto" for auto selection
  std::uint64_t seed = 0;
  std::string fold_hash;
  std::size_t n_rows = 0;
  std::vector<SweepRow> rows;
  std::vector<std::string> diagnostics;
};

// For each q, trains on the embedding plus the top-q ranked context variables
// and scores every held-out fold. The same folds serve every q.
EvalReport sweep(const FeatureTable& table, const VariableRanking& ranking, const SweepConfig& config);

EvalReport sweep(const Corpus& corpus, const CustomerEmbeddings& embeddings, const Annotations& annotations,
                 const ProductId& product, const SweepConfig& config);

}  // namespace ltc
