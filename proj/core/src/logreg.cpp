#include <cmath>
#include <numeric>

#include "ltc/models.hpp"

namespace ltc {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajor> embedding_matrix(const FeatureTable& t) {
  return {t.embedding.data(), static_cast<Eigen::Index>(t.size()), static_cast<Eigen::Index>(t.embed_dim)};
}

// log(1 + e^z) without overflow
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double LogRegModel::decision(const RowView& row) const {
  const auto d = static_cast<Eigen::Index>(row.embedding.size());
  double z = b;
  for (Eigen::Index j = 0; j < d; ++j) z += w[j] * row.embedding[static_cast<std::size_t>(j)];
  for (auto c : row.context) z += w[d + c];
  return z;
}

double logreg_loss_and_gradient(const FeatureTable& t, const std::vector<double>& s, const Eigen::VectorXd& theta,
                                double l2, Eigen::VectorXd* grad) {
  const auto D = static_cast<Eigen::Index>(t.feature_dim());
  const auto d = static_cast<Eigen::Index>(t.embed_dim);
  if (theta.size() != D + 1) throw Error("dimension_mismatch", "logreg parameter size mismatch");
  const std::size_t n = t.size();
  const double total = std::accumulate(s.begin(), s.end(), 0.0);
  Eigen::VectorXd z = embedding_matrix(t) * theta.head(d);
  double loss = 0.0;
  Eigen::VectorXd r(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double zi = z[static_cast<Eigen::Index>(i)] + theta[D];
    for (auto c : t.context[i]) zi += theta[d + c];
    loss += s[i] * (softplus(zi) - t.y[i] * zi);
    r[static_cast<Eigen::Index>(i)] = s[i] * (sigmoid(zi) - t.y[i]) / total;
  }
  loss = loss / total + 0.5 * l2 * theta.head(D).squaredNorm();
  if (grad) {
    grad->setZero(D + 1);
    grad->head(d) = embedding_matrix(t).transpose() * r;
    for (std::size_t i = 0; i < n; ++i)
      for (auto c : t.context[i]) (*grad)[d + c] += r[static_cast<Eigen::Index>(i)];
    (*grad)[D] = r.sum();
    grad->head(D) += l2 * theta.head(D);
  }
  return loss;
}

LogRegModel train_logreg(const FeatureTable& t, const LogRegParams& p) {
  const auto D = static_cast<Eigen::Index>(t.feature_dim());
  const auto s = class_weights(t.y, p.class_weighted);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(D + 1);
  Eigen::VectorXd g, g_new;
  double loss = logreg_loss_and_gradient(t, s, theta, p.l2, &g);
  LogRegModel m;
  m.loss_curve.push_back(loss);
  double step = 1.0;
  for (std::size_t it = 0; it < p.max_iter; ++it) {
    if (g.lpNorm<Eigen::Infinity>() < p.tol) break;
    const double gg = g.squaredNorm();
    Eigen::VectorXd next;
    double next_loss = loss;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      next = theta - step * g;
      next_loss = logreg_loss_and_gradient(t, s, next, p.l2, &g_new);
      if (next_loss <= loss - 1e-4 * step * gg) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const Eigen::VectorXd ds = next - theta, dg = g_new - g;
    const double sy = ds.dot(dg);
    theta = std::move(next);
    g = g_new;
    const bool stalled = loss - next_loss <= 1e-15 * std::max(1.0, std::fabs(loss));
    loss = next_loss;
    m.loss_curve.push_back(loss);
    if (stalled) break;
    step = sy > 0 ? ds.squaredNorm() / sy : 1.0;
    step = std::min(std::max(step, 1e-10), 1e6);
  }
  m.w = theta.head(D);
  m.b = theta[D];
  return m;
}

}  // namespace ltc
