#include <cmath>
#include <limits>
#include <numeric>

#include "ltc/clustering.hpp"
#include "ltc/common.hpp"

namespace ltc {

Dendrogram agglomerative_tree(const DistanceMatrix& dist, Linkage linkage) {
  const std::size_t n = dist.size();
  if (n == 0) throw Error("empty_input", "agglomerative clustering on empty input");

  // Working matrix; ward runs Lance-Williams on squared distances.
  std::vector<double> d(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double v = dist(i, j);
      d[i * n + j] = linkage == Linkage::kWard ? v * v : v;
    }
  auto at = [&](std::size_t i, std::size_t j) -> double& { return d[i * n + j]; };

  std::vector<std::size_t> size(n, 1);
  std::vector<bool> active(n, true);
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  // nn[i]: closest active j > i (smallest j on ties).
  std::vector<std::size_t> nn(n, kNone);
  auto refresh = [&](std::size_t i) {
    nn[i] = kNone;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = i + 1; j < n; ++j)
      if (active[j] && at(i, j) < best) {
        best = at(i, j);
        nn[i] = j;
      }
  };
  for (std::size_t i = 0; i < n; ++i) refresh(i);

  Dendrogram tree;
  tree.n_points = n;
  tree.linkage = linkage;
  tree.merges.reserve(n - 1);
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t a = kNone;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
      if (active[i] && nn[i] != kNone && at(i, nn[i]) < best) {
        best = at(i, nn[i]);
        a = i;
      }
    const std::size_t b = nn[a];
    const double na = static_cast<double>(size[a]), nb = static_cast<double>(size[b]);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a || k == b) continue;
      const double dka = at(k, a), dkb = at(k, b);
      double merged = 0.0;
      switch (linkage) {
        case Linkage::kAverage: merged = (na * dka + nb * dkb) / (na + nb); break;
        case Linkage::kComplete: merged = std::max(dka, dkb); break;
        case Linkage::kWard: {
          const double nk = static_cast<double>(size[k]);
          merged = ((na + nk) * dka + (nb + nk) * dkb - nk * at(a, b)) / (na + nb + nk);
          break;
        }
      }
      at(k, a) = at(a, k) = merged;
    }
    tree.merges.push_back({a, b, linkage == Linkage::kWard ? std::sqrt(std::max(0.0, best)) : best,
                           size[a] + size[b]});
    size[a] += size[b];
    active[b] = false;

    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      if (i == a || nn[i] == a || nn[i] == b) {
        refresh(i);
      } else if (i < a && (at(i, a) < at(i, nn[i]) || (at(i, a) == at(i, nn[i]) && a < nn[i]))) {
        nn[i] = a;
      }
    }
  }
  return tree;
}

Dendrogram agglomerative_tree(const Eigen::MatrixXd& points, Linkage linkage) {
  if (points.rows() == 0) throw Error("empty_input", "agglomerative clustering on empty input");
  return agglomerative_tree(DistanceMatrix(points), linkage);
}

ClusterAssignment cut_tree(const Dendrogram& tree, std::size_t n_clusters) {
  const std::size_t n = tree.n_points;
  if (n == 0) throw Error("empty_input", "cut of an empty tree");
  if (n_clusters < 1 || n_clusters > n)
    throw Error("invalid_argument", "n_clusters must be in [1, " + std::to_string(n) + "]");
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t m = 0; m < n - n_clusters; ++m) {
    const auto ra = find(tree.merges[m].a), rb = find(tree.merges[m].b);
    parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  ClusterAssignment out;
  out.labels.assign(n, kNoise);
  out.config.method = ClusterMethod::kAgglomerative;
  out.config.params.linkage = tree.linkage;
  out.config.params.n_clusters = n_clusters;
  std::vector<int> label_of_root(n, kNoise);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto r = find(i);
    if (label_of_root[r] == kNoise) label_of_root[r] = next++;
    out.labels[i] = label_of_root[r];
  }
  out.n_clusters = static_cast<std::size_t>(next);
  return out;
}

ClusterAssignment agglomerative(const Eigen::MatrixXd& points, Linkage linkage, std::size_t n_clusters) {
  if (points.rows() == 0) throw Error("empty_input", "agglomerative clustering on empty input");
  if (n_clusters < 1 || n_clusters > static_cast<std::size_t>(points.rows()))
    throw Error("invalid_argument", "n_clusters must be in [1, n]");
  return cut_tree(agglomerative_tree(points, linkage), n_clusters);
}

}  // namespace ltc
