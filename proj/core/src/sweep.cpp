#include "ltc/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ltc {

EvalReport sweep(const FeatureTable& table, const VariableRanking& ranking, const SweepConfig& config) {
  if (config.q_list.empty()) throw Error("invalid_argument", "empty q list");
  std::vector<double> qs = config.q_list;
  const bool has_zero = std::find(qs.begin(), qs.end(), 0.0) != qs.end();
  if (!has_zero) qs.insert(qs.begin(), 0.0);

  EvalReport report;
  report.product = ranking.product;
  report.criterion = ranking.criterion;
  report.model = to_string(config.model.kind);
  report.seed = config.seed;
  report.n_rows = table.size();

  const auto folds = kfold_split(table.y, config.folds, mix_seed(config.seed, 1));
  report.fold_hash = fold_hash(folds, table.size());

  std::vector<FeatureTable> per_q(qs.size());
  std::vector<ModelSpec> spec(qs.size(), config.model);
  std::vector<std::string> detail(qs.size());
  std::vector<std::string> select_error(qs.size());
  for (std::size_t qi = 0; qi < qs.size(); ++qi) {
    per_q[qi] = table.select_context(select_quantile(ranking, qs[qi]));
    if (config.model.kind != ModelKind::kAuto) {
      detail[qi] = config.model.describe();
      continue;
    }
    try {
      auto chosen = auto_select(per_q[qi], config.auto_candidates, config.auto_cv_folds, mix_seed(config.seed, 2));
      spec[qi] = chosen.spec;
      detail[qi] = chosen.spec.describe();
    } catch (const std::exception& e) {
      select_error[qi] = e.what();
    }
  }

  const std::size_t k = folds.size();
  const std::size_t n_cells = qs.size() * k;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> f1(n_cells, nan), auc(n_cells, nan);
  std::vector<std::string> errors(n_cells);
  parallel_for(n_cells, [&](std::size_t cell) {
    const std::size_t qi = cell / k, f = cell % k;
    if (!select_error[qi].empty()) {
      errors[cell] = "auto selection failed: " + select_error[qi];
      return;
    }
    std::vector<std::size_t> train_rows;
    for (std::size_t g = 0; g < k; ++g)
      if (g != f) train_rows.insert(train_rows.end(), folds[g].begin(), folds[g].end());
    std::sort(train_rows.begin(), train_rows.end());
    try {
      const auto train_t = per_q[qi].subset(train_rows);
      const auto test_t = per_q[qi].subset(folds[f]);
      const auto model = train(train_t, spec[qi], mix_seed(config.seed, 1000 + f));
      const auto scores = predict_proba(model, test_t);
      auc[cell] = roc_auc(test_t.y, scores);
      f1[cell] = f1_score(test_t.y, threshold_scores(scores, config.threshold));
    } catch (const std::exception& e) {
      errors[cell] = e.what();
      f1[cell] = auc[cell] = nan;
    }
  });

  std::vector<SweepRow> rows(qs.size());
  for (std::size_t qi = 0; qi < qs.size(); ++qi) {
    auto& r = rows[qi];
    r.q = qs[qi];
    r.n_variables = per_q[qi].n_context;
    r.model_detail = detail[qi];
    std::vector<double> f1_ok, auc_ok;
    for (std::size_t f = 0; f < k; ++f) {
      const auto cell = qi * k + f;
      r.f1_folds.push_back(f1[cell]);
      r.auc_folds.push_back(auc[cell]);
      if (!errors[cell].empty()) {
        ++r.failed_folds;
        std::ostringstream msg;
        msg << "q=" << qs[qi] << " fold=" << f << ": " << errors[cell];
        report.diagnostics.push_back(msg.str());
        continue;
      }
      f1_ok.push_back(f1[cell]);
      auc_ok.push_back(auc[cell]);
    }
    r.f1 = mean_std(f1_ok);
    r.auc = mean_std(auc_ok);
  }
  const auto base_it = std::find(qs.begin(), qs.end(), 0.0);
  const SweepRow base = rows[static_cast<std::size_t>(base_it - qs.begin())];
  for (auto& r : rows) {
    r.f1_impr_pct = base.f1.mean != 0.0 ? (r.f1.mean - base.f1.mean) / base.f1.mean * 100.0 : nan;
    r.auc_impr_pct = base.auc.mean != 0.0 ? (r.auc.mean - base.auc.mean) / base.auc.mean * 100.0 : nan;
  }
  if (!has_zero) rows.erase(rows.begin());
  report.rows = std::move(rows);
  return report;
}

EvalReport sweep(const Corpus& corpus, const CustomerEmbeddings& embeddings, const Annotations& annotations,
                 const ProductId& product, const SweepConfig& config) {
  const auto table = build_features(corpus, product, embeddings, annotations);
  const auto ranking = rank_variables(corpus, annotations, product, config.criterion);
  return sweep(table, ranking, config);
}

}  // namespace ltc
