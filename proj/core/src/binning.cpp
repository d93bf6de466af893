#include <algorithm>

#include "ltc/tree.hpp"

namespace ltc {

FeatureBins bin_features(const FeatureTable& table, std::size_t max_bins) {
  if (max_bins < 2 || max_bins > 256) throw Error("invalid_argument", "max_bins must be in [2, 256]");
  FeatureBins bins;
  const std::size_t n = table.size(), d = table.embed_dim;
  bins.n_rows = n;
  bins.edges.resize(d);
  bins.codes.resize(n * d);
  parallel_for(d, [&](std::size_t j) {
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = table.embedding[i * d + j];
    std::vector<double> sorted = col;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> uniq = sorted;
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    auto& edges = bins.edges[j];
    if (uniq.size() <= max_bins) {
      if (!uniq.empty()) edges.assign(uniq.begin(), uniq.end() - 1);
    } else {
      for (std::size_t k = 1; k < max_bins; ++k) edges.push_back(sorted[(k * n) / max_bins - 1]);
      edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
      if (!edges.empty() && edges.back() >= uniq.back()) edges.pop_back();
    }
    for (std::size_t i = 0; i < n; ++i)
      bins.codes[j * n + i] =
          static_cast<std::uint8_t>(std::lower_bound(edges.begin(), edges.end(), col[i]) - edges.begin());
  });
  return bins;
}

}  // namespace ltc
