#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "ltc/clustering.hpp"
#include "oracles.hpp"

namespace {

Eigen::MatrixXd uniform_points(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
  return x;
}

oracle::Link to_oracle(ltc::Linkage l) {
  switch (l) {
    case ltc::Linkage::kAverage: return oracle::Link::kAverage;
    case ltc::Linkage::kComplete: return oracle::Link::kComplete;
    case ltc::Linkage::kWard: return oracle::Link::kWard;
  }
  return oracle::Link::kAverage;
}

void expect_first_member_numbering(const std::vector<int>& labels) {
  int next = 0;
  for (int l : labels) {
    if (l < 0) continue;
    EXPECT_LE(l, next);
    if (l == next) ++next;
  }
}

TEST(Dbscan, MatchesBruteForce) {
  std::mt19937_64 rng(3);
  for (int f = 0; f < 8; ++f) {
    auto x = fixture::blobs(4, 30, 3, rng, 1.0 + 0.2 * f);
    for (double eps : {0.8, 1.5, 2.5})
      for (std::size_t mp : {3, 5, 10}) {
        auto got = ltc::dbscan(x, eps, mp);
        auto want = oracle::dbscan(x, eps, mp);
        EXPECT_EQ(oracle::canonical(got.labels), oracle::canonical(want)) << "eps=" << eps << " min_pts=" << mp;
        expect_first_member_numbering(got.labels);
      }
  }
}

TEST(Dbscan, DegenerateParameters) {
  auto x = uniform_points(40, 2, 1);
  auto all_noise = ltc::dbscan(x, 1e-9, 2);
  EXPECT_EQ(all_noise.n_clusters, 0u);
  EXPECT_EQ(all_noise.n_noise(), 40u);
  auto singletons = ltc::dbscan(x, 1e-9, 1);
  EXPECT_EQ(singletons.n_clusters, 40u);
  auto one = ltc::dbscan(x, 100.0, 5);
  EXPECT_EQ(one.n_clusters, 1u);
}

TEST(Agglomerative, MergeSequenceMatchesBruteForce) {
  for (std::uint64_t s = 0; s < 6; ++s) {
    auto x = uniform_points(60, 3, 10 + s);
    for (auto link : {ltc::Linkage::kAverage, ltc::Linkage::kComplete, ltc::Linkage::kWard}) {
      auto tree = ltc::agglomerative_tree(x, link);
      auto want = oracle::agglomerative(x, to_oracle(link));
      ASSERT_EQ(tree.merges.size(), want.size());
      for (std::size_t m = 0; m < want.size(); ++m) {
        EXPECT_EQ(tree.merges[m].a, want[m].a) << ltc::to_string(link) << " step " << m;
        EXPECT_EQ(tree.merges[m].b, want[m].b) << ltc::to_string(link) << " step " << m;
        EXPECT_NEAR(tree.merges[m].distance, want[m].distance, 1e-9 * (1.0 + want[m].distance));
      }
      for (std::size_t k : {1, 2, 5, 17, 60}) {
        auto cut = ltc::cut_tree(tree, k);
        EXPECT_EQ(cut.n_clusters, k);
        EXPECT_EQ(oracle::canonical(cut.labels), oracle::cut(want, 60, k));
        expect_first_member_numbering(cut.labels);
      }
    }
  }
}

TEST(Agglomerative, TiesGoToSmallestPair) {
  // Unit square corners plus a far point: four equal nearest pairs.
  Eigen::MatrixXd x(5, 2);
  x << 0, 0, 1, 0, 0, 1, 1, 1, 10, 10;
  auto tree = ltc::agglomerative_tree(x, ltc::Linkage::kComplete);
  EXPECT_EQ(tree.merges[0].a, 0u);
  EXPECT_EQ(tree.merges[0].b, 1u);
  EXPECT_EQ(tree.merges[1].a, 2u);
  EXPECT_EQ(tree.merges[1].b, 3u);
}

TEST(Agglomerative, MergeSizesAndMonotoneHeights) {
  auto x = uniform_points(50, 4, 77);
  for (auto link : {ltc::Linkage::kAverage, ltc::Linkage::kComplete, ltc::Linkage::kWard}) {
    auto tree = ltc::agglomerative_tree(x, link);
    EXPECT_EQ(tree.merges.back().size, 50u);
    for (std::size_t m = 1; m < tree.merges.size(); ++m)
      EXPECT_GE(tree.merges[m].distance, tree.merges[m - 1].distance - 1e-12);
  }
}

TEST(Silhouette, MatchesDoubleLoop) {
  std::mt19937_64 rng(21);
  for (int f = 0; f < 10; ++f) {
    auto x = fixture::blobs(3, 25, 4, rng, 1.5);
    auto a = ltc::dbscan(x, 1.6, 4);
    if (a.n_clusters >= 2) {
      EXPECT_NEAR(ltc::silhouette(x, a.labels), oracle::silhouette(x, a.labels), 1e-9);
    }
    auto b = ltc::agglomerative(x, ltc::Linkage::kWard, 4);
    EXPECT_NEAR(ltc::silhouette(x, b.labels), oracle::silhouette(x, b.labels), 1e-9);
    EXPECT_NEAR(ltc::silhouette(ltc::DistanceMatrix(x), b.labels), oracle::silhouette(x, b.labels), 1e-9);
  }
}

TEST(Silhouette, WellSeparatedBlobsScoreHigh) {
  std::mt19937_64 rng(2);
  auto x = fixture::blobs(3, 30, 3, rng, 0.3);
  auto a = ltc::agglomerative(x, ltc::Linkage::kAverage, 3);
  EXPECT_GT(ltc::silhouette(x, a.labels), 0.8);
}

TEST(Selection, PicksHighestSilhouetteWithinNoiseLimit) {
  std::mt19937_64 rng(5);
  auto x = fixture::blobs(4, 25, 4, rng, 0.5);
  auto grid = ltc::default_cluster_grid(x);
  auto sel = ltc::select_clustering(x, grid, 0.3);
  ASSERT_TRUE(sel.best_silhouette.has_value());
  EXPECT_EQ(sel.log.size(), grid.size());
  for (const auto& e : sel.log) {
    EXPECT_EQ(e.eligible, e.n_noise <= static_cast<std::size_t>(0.3 * 100));
    if (e.eligible && e.silhouette) {
      EXPECT_LE(*e.silhouette, *sel.best_silhouette + 1e-15);
    }
  }
  EXPECT_LE(sel.best.n_noise(), 30u);
  EXPECT_EQ(sel.best.n_clusters, 4u);
  EXPECT_NEAR(*sel.best_silhouette, oracle::silhouette(x, sel.best.labels), 1e-9);
}

TEST(Selection, FailsWhenNothingQualifies) {
  auto x = uniform_points(30, 2, 3);
  std::vector<ltc::ClusterConfig> grid(1);
  grid[0].params.eps = 1e-9;
  grid[0].params.min_pts = 3;
  EXPECT_THROW(ltc::select_clustering(x, grid), ltc::Error);
}

TEST(Linkage, ParseAndName) {
  EXPECT_EQ(ltc::parse_linkage("ward"), ltc::Linkage::kWard);
  EXPECT_EQ(ltc::to_string(ltc::Linkage::kComplete), "complete");
  EXPECT_THROW(ltc::parse_linkage("single"), ltc::Error);
}

}  // namespace
