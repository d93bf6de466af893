#pragma once

#include <Eigen/Dense>
#include <cstddef>

namespace ltc {

struct PcaModel {
  Eigen::VectorXd mean;                // d
  Eigen::MatrixXd components;          // k x d, orthonormal rows
  Eigen::VectorXd explained_variance;  // k, non-increasing (sample variance, n - 1)
  double total_variance = 0.0;         // trace of the sample covariance

  std::size_t n_components() const { return static_cast<std::size_t>(components.rows()); }
  std::size_t input_dim() const { return static_cast<std::size_t>(mean.size()); }
  double explained_variance_ratio(std::size_t i) const;
};

// Covariance eigendecomposition; rows of `data` are samples.
PcaModel pca_fit(const Eigen::MatrixXd& data, std::size_t k = 50);

Eigen::MatrixXd pca_transform(const PcaModel& model, const Eigen::MatrixXd& data);
Eigen::MatrixXd pca_inverse_transform(const PcaModel& model, const Eigen::MatrixXd& projected);

}  // namespace ltc
