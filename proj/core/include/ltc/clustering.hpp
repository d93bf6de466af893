#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace ltc {

enum class ClusterMethod { kDbscan, kAgglomerative };
enum class Linkage { kAverage, kComplete, kWard };

std::string to_string(ClusterMethod m);
std::string to_string(Linkage l);
Linkage parse_linkage(const std::string& s);

struct ClusterParams {
  double eps = 0.0;          // dbscan
  std::size_t min_pts = 0;   // dbscan
  Linkage linkage = Linkage::kAverage;  // agglomerative
  std::size_t n_clusters = 0;           // agglomerative
};

struct ClusterConfig {
  ClusterMethod method = ClusterMethod::kDbscan;
  ClusterParams params;

  std::string describe() const;
};

inline constexpr int kNoise = -1;

struct ClusterAssignment {
  std::vector<int> labels;  // kNoise or 0..n_clusters-1, numbered by first member index
  std::size_t n_clusters = 0;
  ClusterConfig config;

  std::size_t n_noise() const;
  std::vector<std::vector<std::size_t>> members() const;
};

// Dense symmetric Euclidean distances, computed coordinate by coordinate.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(const Eigen::MatrixXd& points);
  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::vector<double> d_;
};

// Core points (|eps-neighbourhood| >= min_pts, self included) are grouped into
// connected components, numbered in index order. A border point joins the
// cluster of its nearest core neighbour; everything else is noise.
ClusterAssignment dbscan(const Eigen::MatrixXd& points, double eps, std::size_t min_pts);
ClusterAssignment dbscan(const DistanceMatrix& distances, double eps, std::size_t min_pts);

struct Merge {
  std::size_t a = 0;  // smallest point index of the first merged cluster
  std::size_t b = 0;  // ... of the second, a < b
  double distance = 0.0;
  std::size_t size = 0;  // size of the merged cluster
};

struct Dendrogram {
  std::size_t n_points = 0;
  Linkage linkage = Linkage::kAverage;
  std::vector<Merge> merges;  // in merge order, n_points - 1 entries
};

// Lance-Williams updates on the full distance matrix; at each step the closest
// pair merges, ties resolved by the lexicographically smallest (a, b).
Dendrogram agglomerative_tree(const Eigen::MatrixXd& points, Linkage linkage);
Dendrogram agglomerative_tree(const DistanceMatrix& distances, Linkage linkage);
ClusterAssignment cut_tree(const Dendrogram& tree, std::size_t n_clusters);
ClusterAssignment agglomerative(const Eigen::MatrixXd& points, Linkage linkage, std::size_t n_clusters);

// Mean of (b - a) / max(a, b) over non-noise samples; singleton clusters score 0.
double silhouette(const Eigen::MatrixXd& points, const std::vector<int>& labels);
double silhouette(const DistanceMatrix& distances, const std::vector<int>& labels);

struct SelectionEntry {
  ClusterConfig config;
  std::size_t n_clusters = 0;
  std::size_t n_noise = 0;
  std::optional<double> silhouette;  // empty when fewer than 2 clusters
  bool eligible = true;              // noise share within the selection limit
};

struct ClusteringSelection {
  ClusterAssignment best;
  std::optional<double> best_silhouette;
  std::vector<SelectionEntry> log;
};

// eps at 10 quantiles of the 5-NN distance x min_pts {3, 5, 10}, plus average
// and ward linkage cut at n/50, n/30, n/20 and n/10 clusters.
std::vector<ClusterConfig> default_cluster_grid(const Eigen::MatrixXd& points);
std::vector<ClusterConfig> default_cluster_grid(const DistanceMatrix& distances);

// Highest silhouette wins; ties go to more clusters, then dbscan before
// agglomerative, then grid order. Configurations labelling more than
// max_noise_fraction of the points as noise are logged but not eligible.
ClusteringSelection select_clustering(const Eigen::MatrixXd& points, const std::vector<ClusterConfig>& configs,
                                      double max_noise_fraction = 1.0);

}  // namespace ltc
