#include "ltc/pca.hpp"

#include <Eigen/Eigenvalues>

#include "ltc/common.hpp"

namespace ltc {

double PcaModel::explained_variance_ratio(std::size_t i) const {
  return total_variance > 0.0 ? explained_variance(static_cast<Eigen::Index>(i)) / total_variance : 0.0;
}

PcaModel pca_fit(const Eigen::MatrixXd& data, std::size_t k) {
  const auto n = static_cast<std::size_t>(data.rows());
  const auto d = static_cast<std::size_t>(data.cols());
  if (k == 0) throw Error("invalid_argument", "pca needs k >= 1");
  if (n < 2) throw Error("invalid_argument", "pca needs at least 2 samples");
  if (k > std::min(n, d))
    throw Error("invalid_argument", "pca k=" + std::to_string(k) + " exceeds min(n, d)=" +
                                        std::to_string(std::min(n, d)));
  if (!data.allFinite()) throw Error("non_finite", "pca input contains non-finite values");

  PcaModel model;
  model.mean = data.colwise().mean().transpose();
  const Eigen::MatrixXd centered = data.rowwise() - model.mean.transpose();
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  model.total_variance = cov.trace();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error("numeric", "eigendecomposition failed");
  const auto& values = solver.eigenvalues();    // ascending
  const auto& vectors = solver.eigenvectors();  // columns

  model.components.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  model.explained_variance.resize(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    const auto src = static_cast<Eigen::Index>(d - 1 - i);
    Eigen::VectorXd v = vectors.col(src);
    // Sign convention: largest-magnitude coordinate positive.
    Eigen::Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    model.components.row(static_cast<Eigen::Index>(i)) = v.transpose();
    model.explained_variance(static_cast<Eigen::Index>(i)) = std::max(0.0, values(src));
  }
  return model;
}

Eigen::MatrixXd pca_transform(const PcaModel& model, const Eigen::MatrixXd& data) {
  if (static_cast<std::size_t>(data.cols()) != model.input_dim())
    throw Error("dimension_mismatch", "pca_transform: expected dimension " +
                                          std::to_string(model.input_dim()) + ", got " +
                                          std::to_string(data.cols()));
  return (data.rowwise() - model.mean.transpose()) * model.components.transpose();
}

Eigen::MatrixXd pca_inverse_transform(const PcaModel& model, const Eigen::MatrixXd& projected) {
  if (static_cast<std::size_t>(projected.cols()) != model.n_components())
    throw Error("dimension_mismatch", "pca_inverse_transform: wrong component count");
  return (projected * model.components).rowwise() + model.mean.transpose();
}

}  // namespace ltc
