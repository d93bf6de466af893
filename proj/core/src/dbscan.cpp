#include <cmath>
#include <limits>
#include <sstream>

#include "ltc/clustering.hpp"
#include "ltc/common.hpp"

namespace ltc {

std::string to_string(ClusterMethod m) { return m == ClusterMethod::kDbscan ? "dbscan" : "agglomerative"; }

std::string to_string(Linkage l) {
  switch (l) {
    case Linkage::kAverage: return "average";
    case Linkage::kComplete: return "complete";
    case Linkage::kWard: return "ward";
  }
  return "?";
}

Linkage parse_linkage(const std::string& s) {
  if (s == "average") return Linkage::kAverage;
  if (s == "complete") return Linkage::kComplete;
  if (s == "ward") return Linkage::kWard;
  throw Error("invalid_argument", "unknown linkage '" + s + "'");
}

std::string ClusterConfig::describe() const {
  std::ostringstream os;
  if (method == ClusterMethod::kDbscan)
    os << "dbscan(eps=" << params.eps << ",min_pts=" << params.min_pts << ")";
  else
    os << "agglomerative(" << to_string(params.linkage) << ",k=" << params.n_clusters << ")";
  return os.str();
}

std::size_t ClusterAssignment::n_noise() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), kNoise));
}

std::vector<std::vector<std::size_t>> ClusterAssignment::members() const {
  std::vector<std::vector<std::size_t>> out(n_clusters);
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] >= 0) out[static_cast<std::size_t>(labels[i])].push_back(i);
  return out;
}

DistanceMatrix::DistanceMatrix(const Eigen::MatrixXd& points)
    : n_(static_cast<std::size_t>(points.rows())), d_(n_ * n_, 0.0) {
  const Eigen::Index dim = points.cols();
  // Row-major copy keeps the inner loop contiguous.
  std::vector<double> rows(n_ * static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < n_; ++i)
    for (Eigen::Index k = 0; k < dim; ++k) rows[i * dim + k] = points(static_cast<Eigen::Index>(i), k);
  parallel_for(n_, [&](std::size_t i) {
    const double* pi = &rows[i * dim];
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double* pj = &rows[j * dim];
      double s = 0.0;
      for (Eigen::Index k = 0; k < dim; ++k) {
        const double diff = pi[k] - pj[k];
        s += diff * diff;
      }
      d_[i * n_ + j] = std::sqrt(s);
    }
  });
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j) d_[j * n_ + i] = d_[i * n_ + j];
}

ClusterAssignment dbscan(const DistanceMatrix& dist, double eps, std::size_t min_pts) {
  const std::size_t n = dist.size();
  if (n == 0) throw Error("empty_input", "dbscan on empty input");
  if (!(eps > 0.0)) throw Error("invalid_argument", "dbscan eps must be > 0");
  if (min_pts < 1) throw Error("invalid_argument", "dbscan min_pts must be >= 1");

  std::vector<bool> core(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < n && count < min_pts; ++j)
      if (dist(i, j) <= eps) ++count;
    core[i] = count >= min_pts;
  }

  ClusterAssignment out;
  out.labels.assign(n, kNoise);
  out.config.method = ClusterMethod::kDbscan;
  out.config.params.eps = eps;
  out.config.params.min_pts = min_pts;

  int next_label = 0;
  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (!core[seed] || out.labels[seed] != kNoise) continue;
    const int label = next_label++;
    out.labels[seed] = label;
    stack.assign(1, seed);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      for (std::size_t q = 0; q < n; ++q)
        if (core[q] && out.labels[q] == kNoise && dist(p, q) <= eps) {
          out.labels[q] = label;
          stack.push_back(q);
        }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
      if (core[j] && dist(i, j) <= eps && dist(i, j) < best) {
        best = dist(i, j);
        out.labels[i] = out.labels[j];
      }
  }
  // Renumber by first member so labels are canonical.
  std::vector<int> remap(static_cast<std::size_t>(next_label), kNoise);
  int relabeled = 0;
  for (auto& l : out.labels) {
    if (l == kNoise) continue;
    if (remap[l] == kNoise) remap[l] = relabeled++;
    l = remap[l];
  }
  out.n_clusters = static_cast<std::size_t>(relabeled);
  return out;
}

ClusterAssignment dbscan(const Eigen::MatrixXd& points, double eps, std::size_t min_pts) {
  if (points.rows() == 0) throw Error("empty_input", "dbscan on empty input");
  return dbscan(DistanceMatrix(points), eps, min_pts);
}

}  // namespace ltc
