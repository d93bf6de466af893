#include <map>

#include "ltc/clustering.hpp"
#include "ltc/common.hpp"

namespace ltc {

double silhouette(const DistanceMatrix& dist, const std::vector<int>& labels) {
  const std::size_t n = dist.size();
  if (labels.size() != n) throw Error("invalid_argument", "labels/points size mismatch");
  std::map<int, std::size_t> compact;
  for (int l : labels)
    if (l != kNoise) compact.emplace(l, 0);
  if (compact.size() < 2) throw Error("undefined", "silhouette undefined: fewer than 2 clusters");
  std::size_t next = 0;
  for (auto& [l, idx] : compact) idx = next++;
  std::vector<std::size_t> cluster(n, 0), size(compact.size(), 0);
  for (std::size_t i = 0; i < n; ++i)
    if (labels[i] != kNoise) ++size[cluster[i] = compact[labels[i]]];

  std::vector<double> scores(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    if (labels[i] == kNoise) return;
    const std::size_t own = cluster[i];
    if (size[own] < 2) return;  // singleton: 0
    std::vector<double> sums(size.size(), 0.0);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && labels[j] != kNoise) sums[cluster[j]] += dist(i, j);
    const double a = sums[own] / static_cast<double>(size[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < size.size(); ++c)
      if (c != own) b = std::min(b, sums[c] / static_cast<double>(size[c]));
    const double denom = std::max(a, b);
    scores[i] = denom > 0.0 ? (b - a) / denom : 0.0;
  });
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (labels[i] != kNoise) {
      total += scores[i];
      ++counted;
    }
  return total / static_cast<double>(counted);
}

double silhouette(const Eigen::MatrixXd& points, const std::vector<int>& labels) {
  return silhouette(DistanceMatrix(points), labels);
}

}  // namespace ltc
