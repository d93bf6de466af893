#include <cmath>
#include <map>

#include "ltc/clustering.hpp"
#include "ltc/common.hpp"

namespace ltc {

std::vector<ClusterConfig> default_cluster_grid(const DistanceMatrix& dist) {
  const std::size_t n = dist.size();
  std::vector<ClusterConfig> grid;
  if (n < 3) return grid;

  const std::size_t kth = std::min<std::size_t>(5, n - 1);
  std::vector<double> knn(n);
  std::vector<double> row;
  for (std::size_t i = 0; i < n; ++i) {
    row.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) row.push_back(dist(i, j));
    std::nth_element(row.begin(), row.begin() + static_cast<long>(kth - 1), row.end());
    knn[i] = row[kth - 1];
  }
  std::sort(knn.begin(), knn.end());
  std::vector<double> eps_values;
  for (int q = 0; q < 10; ++q) {
    const double pos = (0.05 + 0.1 * q) * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(n - 1, lo + 1);
    const double v = knn[lo] + (pos - static_cast<double>(lo)) * (knn[hi] - knn[lo]);
    if (v > 0.0 && (eps_values.empty() || v > eps_values.back())) eps_values.push_back(v);
  }
  for (std::size_t min_pts : {3u, 5u, 10u})
    for (double eps : eps_values) {
      ClusterConfig c;
      c.method = ClusterMethod::kDbscan;
      c.params.eps = eps;
      c.params.min_pts = min_pts;
      grid.push_back(c);
    }
  std::vector<std::size_t> ks;
  for (std::size_t div : {50u, 30u, 20u, 10u}) {
    const std::size_t k = std::clamp<std::size_t>(n / div, 2, n - 1);
    if (std::find(ks.begin(), ks.end(), k) == ks.end()) ks.push_back(k);
  }
  for (Linkage l : {Linkage::kAverage, Linkage::kWard})
    for (std::size_t k : ks) {
      ClusterConfig c;
      c.method = ClusterMethod::kAgglomerative;
      c.params.linkage = l;
      c.params.n_clusters = k;
      grid.push_back(c);
    }
  return grid;
}

std::vector<ClusterConfig> default_cluster_grid(const Eigen::MatrixXd& points) {
  return default_cluster_grid(DistanceMatrix(points));
}

ClusteringSelection select_clustering(const Eigen::MatrixXd& points, const std::vector<ClusterConfig>& configs,
                                      double max_noise_fraction) {
  if (points.rows() == 0) throw Error("empty_input", "clustering selection on empty input");
  if (configs.empty()) throw Error("invalid_argument", "no clustering configurations");
  const DistanceMatrix dist(points);
  std::map<Linkage, Dendrogram> trees;

  std::vector<ClusterAssignment> results(configs.size());
  ClusteringSelection out;
  out.log.resize(configs.size());
  for (std::size_t c = 0; c < configs.size(); ++c) {
    const auto& cfg = configs[c];
    if (cfg.method == ClusterMethod::kDbscan) {
      results[c] = dbscan(dist, cfg.params.eps, cfg.params.min_pts);
    } else {
      auto it = trees.find(cfg.params.linkage);
      if (it == trees.end()) it = trees.emplace(cfg.params.linkage, agglomerative_tree(dist, cfg.params.linkage)).first;
      results[c] = cut_tree(it->second, cfg.params.n_clusters);
    }
  }
  parallel_for(configs.size(), [&](std::size_t c) {
    auto& entry = out.log[c];
    entry.config = configs[c];
    entry.n_clusters = results[c].n_clusters;
    entry.n_noise = results[c].n_noise();
    if (results[c].n_clusters >= 2) entry.silhouette = silhouette(dist, results[c].labels);
    entry.eligible = static_cast<double>(entry.n_noise) <= max_noise_fraction * static_cast<double>(dist.size());
  });

  std::optional<std::size_t> best;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    const auto& e = out.log[c];
    if (!e.silhouette || !e.eligible) continue;
    if (!best) {
      best = c;
      continue;
    }
    const auto& b = out.log[*best];
    if (*e.silhouette > *b.silhouette ||
        (*e.silhouette == *b.silhouette &&
         (e.n_clusters > b.n_clusters ||
          (e.n_clusters == b.n_clusters && e.config.method == ClusterMethod::kDbscan &&
           b.config.method == ClusterMethod::kAgglomerative))))
      best = c;
  }
  if (!best) throw Error("degenerate", "no clustering configuration produced 2 or more clusters within the noise limit");
  out.best = std::move(results[*best]);
  out.best_silhouette = out.log[*best].silhouette;
  return out;
}

}  // namespace ltc
