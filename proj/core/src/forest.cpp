#include <cmath>
#include <random>

#include "ltc/models.hpp"

namespace ltc {

double ForestModel::predict(const RowView& row) const {
  if (trees.empty()) return 0.5;
  std::size_t votes = 0;
  for (const auto& t : trees)
    if (t.predict(row) > 0.5) ++votes;
  return static_cast<double>(votes) / static_cast<double>(trees.size());
}

ForestModel train_forest(const FeatureTable& t, const ForestParams& p, std::uint64_t seed) {
  if (p.n_trees == 0) throw Error("invalid_argument", "forest needs at least one tree");
  const auto bins = bin_features(t, p.max_bins);
  const auto s = class_weights(t.y, p.class_weighted);
  TreeParams tp;
  tp.max_depth = p.max_depth;
  tp.min_samples_leaf = p.min_samples_leaf;
  tp.min_child_weight = 0.0;
  tp.features_per_node = p.features_per_node
                             ? p.features_per_node
                             : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(t.feature_dim())));
  ForestModel m;
  m.trees.resize(p.n_trees);
  const std::size_t n = t.size();
  parallel_for(p.n_trees, [&](std::size_t k) {
    std::mt19937_64 rng(mix_seed(seed, k));
    std::vector<double> count(n, 0.0);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t i = 0; i < n; ++i) count[pick(rng)] += 1.0;
    std::vector<double> a(n), b(n);
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (count[i] == 0.0) continue;
      a[i] = t.y[i] ? s[i] * count[i] : 0.0;
      b[i] = t.y[i] ? 0.0 : s[i] * count[i];
      rows.push_back(i);
    }
    m.trees[k] = fit_tree(t, bins, a, b, rows, SplitCriterion::kGini, tp, rng);
  });
  return m;
}

}  // namespace ltc
