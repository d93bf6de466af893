#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ltc/models.hpp"

namespace ltc {

double GbdtModel::decision(const RowView& row) const {
  double z = init;
  for (const auto& t : trees) z += t.predict(row);
  return z;
}

GbdtModel train_gbdt(const FeatureTable& t, const GbdtParams& p, std::uint64_t seed) {
  if (p.learning_rate <= 0 || p.subsample <= 0 || p.subsample > 1)
    throw Error("invalid_argument", "gbdt learning_rate must be > 0 and subsample in (0, 1]");
  const std::size_t n = t.size();
  const auto bins = bin_features(t, p.max_bins);
  const auto s = class_weights(t.y, p.class_weighted);
  const double total = std::accumulate(s.begin(), s.end(), 0.0);
  double pos = 0.0;
  for (std::size_t i = 0; i < n; ++i) pos += s[i] * t.y[i];
  GbdtModel m;
  m.init = std::log(pos / (total - pos));

  TreeParams tp;
  tp.max_depth = p.max_depth;
  tp.min_samples_leaf = p.min_samples_leaf;
  tp.min_child_weight = p.min_child_weight;
  tp.lambda = p.lambda;

  std::mt19937_64 rng(seed);
  std::vector<double> f(n, m.init), g(n), h(n);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  // Fills g and h at the current scores and returns the mean loss there.
  auto gradients = [&] {
    double l = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = f[i];
      const double e = std::exp(-std::abs(z));
      const double pr = z >= 0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
      l += s[i] * (std::max(z, 0.0) + std::log1p(e) - t.y[i] * z);
      g[i] = s[i] * (pr - t.y[i]);
      h[i] = s[i] * pr * (1.0 - pr);
    }
    return l / total;
  };
  std::bernoulli_distribution keep(p.subsample);
  std::vector<std::int32_t> leaf(n, -1);
  for (std::size_t k = 0; k < p.n_trees; ++k) {
    m.loss_curve.push_back(gradients());
    std::vector<std::size_t> rows;
    if (p.subsample < 1.0) {
      for (std::size_t i = 0; i < n; ++i)
        if (keep(rng)) rows.push_back(i);
      if (rows.empty()) rows = all;
    }
    const bool sub = p.subsample < 1.0;
    if (sub) std::fill(leaf.begin(), leaf.end(), -1);
    Tree tree = fit_tree(t, bins, g, h, sub ? rows : all, SplitCriterion::kGradient, tp, rng, &leaf);
    for (auto& node : tree.nodes) node.value *= p.learning_rate;
    for (std::size_t i = 0; i < n; ++i)
      f[i] += leaf[i] >= 0 ? tree.nodes[static_cast<std::size_t>(leaf[i])].value : tree.predict(t.row(i));
    m.trees.push_back(std::move(tree));
  }
  m.loss_curve.push_back(gradients());
  return m;
}

}  // namespace ltc
