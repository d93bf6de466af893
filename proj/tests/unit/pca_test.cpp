#include <gtest/gtest.h>

#include <random>

#include "ltc/common.hpp"
#include "ltc/pca.hpp"
#include "oracles.hpp"

namespace {

Eigen::MatrixXd correlated(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd mix(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < mix.size(); ++i) mix.data()[i] = g(rng);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
  return x * mix + Eigen::MatrixXd::Constant(x.rows(), x.cols(), 3.0);
}

TEST(Pca, FullRankRoundTrip) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto x = correlated(100, 20, s);
    auto m = ltc::pca_fit(x, 20);
    auto back = ltc::pca_inverse_transform(m, ltc::pca_transform(m, x));
    EXPECT_LT((back - x).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Pca, VariancesMatchJacobiEigenvalues) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto x = correlated(100, 20, 100 + s);
    auto m = ltc::pca_fit(x, 20);
    auto ev = oracle::jacobi_eigenvalues(oracle::sample_covariance(x));
    for (std::size_t i = 0; i < 20; ++i) {
      EXPECT_NEAR(m.explained_variance(static_cast<Eigen::Index>(i)), ev[i], 1e-6);
      if (i) {
        EXPECT_LE(m.explained_variance(static_cast<Eigen::Index>(i)), m.explained_variance(static_cast<Eigen::Index>(i - 1)));
      }
    }
    double trace = 0;
    for (double v : ev) trace += v;
    EXPECT_NEAR(m.total_variance, trace, 1e-8);
  }
}

TEST(Pca, ComponentsOrthonormal) {
  auto x = correlated(80, 12, 5);
  auto m = ltc::pca_fit(x, 5);
  Eigen::MatrixXd g = m.components * m.components.transpose();
  EXPECT_LT((g - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-10);
  double ratio = 0;
  for (std::size_t i = 0; i < 5; ++i) ratio += m.explained_variance_ratio(i);
  EXPECT_LE(ratio, 1.0 + 1e-12);
}

TEST(Pca, ProjectionHasComponentVariance) {
  auto x = correlated(200, 8, 9);
  auto m = ltc::pca_fit(x, 3);
  auto y = ltc::pca_transform(m, x);
  for (Eigen::Index c = 0; c < 3; ++c) {
    const double mean = y.col(c).mean();
    EXPECT_NEAR(mean, 0.0, 1e-9);
    const double var = (y.col(c).array() - mean).square().sum() / 199.0;
    EXPECT_NEAR(var, m.explained_variance(c), 1e-8);
  }
}

TEST(Pca, RejectsBadShapes) {
  auto x = correlated(10, 4, 1);
  EXPECT_THROW(ltc::pca_fit(x, 5), ltc::Error);
  EXPECT_THROW(ltc::pca_fit(x, 0), ltc::Error);
  auto m = ltc::pca_fit(x, 2);
  EXPECT_THROW(ltc::pca_transform(m, Eigen::MatrixXd::Zero(3, 5)), ltc::Error);
}

}  // namespace
