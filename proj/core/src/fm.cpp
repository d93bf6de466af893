#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ltc/models.hpp"

namespace ltc {

namespace {

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// Pairwise term and the per-factor sums q_f = sum_j v_jf x_j.
double interaction(const FmModel& m, const RowView& row, Eigen::VectorXd& q) {
  const auto k = m.v.cols();
  const auto d = static_cast<Eigen::Index>(row.embedding.size());
  q.setZero(k);
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(k);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double x = row.embedding[static_cast<std::size_t>(j)];
    if (x == 0.0) continue;
    q += m.v.row(j).transpose() * x;
    sq += m.v.row(j).transpose().cwiseAbs2() * (x * x);
  }
  for (auto c : row.context) {
    q += m.v.row(d + c).transpose();
    sq += m.v.row(d + c).transpose().cwiseAbs2();
  }
  return 0.5 * (q.squaredNorm() - sq.sum());
}

double linear(const FmModel& m, const RowView& row) {
  const auto d = static_cast<Eigen::Index>(row.embedding.size());
  double z = m.w0;
  for (Eigen::Index j = 0; j < d; ++j) z += m.w[j] * row.embedding[static_cast<std::size_t>(j)];
  for (auto c : row.context) z += m.w[d + c];
  return z;
}

}  // namespace

double FmModel::decision(const RowView& row) const {
  Eigen::VectorXd q;
  return linear(*this, row) + (v.cols() ? interaction(*this, row, q) : 0.0);
}

Eigen::VectorXd FmModel::flatten() const {
  Eigen::VectorXd theta(1 + w.size() + v.size());
  theta[0] = w0;
  theta.segment(1, w.size()) = w;
  theta.tail(v.size()) = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
  return theta;
}

void FmModel::unflatten(const Eigen::VectorXd& theta) {
  if (theta.size() != 1 + w.size() + v.size()) throw Error("dimension_mismatch", "fm parameter size mismatch");
  w0 = theta[0];
  w = theta.segment(1, w.size());
  Eigen::Map<Eigen::VectorXd>(v.data(), v.size()) = theta.tail(v.size());
}

double fm_loss_and_gradient(const FeatureTable& t, const std::vector<double>& s, const FmModel& m, double l2,
                            Eigen::VectorXd* grad) {
  const auto D = static_cast<Eigen::Index>(t.feature_dim());
  const auto d = static_cast<Eigen::Index>(t.embed_dim);
  const auto k = m.v.cols();
  if (m.w.size() != D || m.v.rows() != D) throw Error("dimension_mismatch", "fm model does not match table");
  const double total = std::accumulate(s.begin(), s.end(), 0.0);
  Eigen::VectorXd gw, q;
  Eigen::MatrixXd gv;
  double gw0 = 0.0;
  if (grad) {
    gw = Eigen::VectorXd::Zero(D);
    gv = Eigen::MatrixXd::Zero(D, k);
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto row = t.row(i);
    const double z = linear(m, row) + (k ? interaction(m, row, q) : 0.0);
    loss += s[i] * (softplus(z) - t.y[i] * z);
    if (!grad) continue;
    const double r = s[i] * (sigmoid(z) - t.y[i]) / total;
    gw0 += r;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double x = row.embedding[static_cast<std::size_t>(j)];
      if (x == 0.0) continue;
      gw[j] += r * x;
      if (k) gv.row(j) += r * (x * q.transpose() - m.v.row(j) * (x * x));
    }
    for (auto c : row.context) {
      gw[d + c] += r;
      if (k) gv.row(d + c) += r * (q.transpose() - m.v.row(d + c));
    }
  }
  loss = loss / total + 0.5 * l2 * (m.w.squaredNorm() + m.v.squaredNorm());
  if (grad) {
    gw += l2 * m.w;
    gv += l2 * m.v;
    grad->resize(1 + D + D * k);
    (*grad)[0] = gw0;
    grad->segment(1, D) = gw;
    grad->tail(D * k) = Eigen::Map<const Eigen::VectorXd>(gv.data(), D * k);
  }
  return loss;
}

FmModel train_fm(const FeatureTable& t, const FmParams& p, std::uint64_t seed) {
  const auto D = static_cast<Eigen::Index>(t.feature_dim());
  const auto d = static_cast<Eigen::Index>(t.embed_dim);
  const auto k = static_cast<Eigen::Index>(p.factors);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> init(0.0, p.init_std);
  FmModel m;
  m.w = Eigen::VectorXd::Zero(D);
  m.v.resize(D, k);
  for (Eigen::Index c = 0; c < k; ++c)
    for (Eigen::Index j = 0; j < D; ++j) m.v(j, c) = init(rng);
  const auto s = class_weights(t.y, p.class_weighted);
  const double mean_s = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());

  std::vector<std::size_t> order(t.size());
  std::iota(order.begin(), order.end(), 0);
  Eigen::VectorXd q;
  m.loss_curve.push_back(fm_loss_and_gradient(t, s, m, p.l2, nullptr));
  for (std::size_t epoch = 0; epoch < p.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (auto i : order) {
      const auto row = t.row(i);
      const double z = linear(m, row) + (k ? interaction(m, row, q) : 0.0);
      const double r = s[i] / mean_s * (sigmoid(z) - t.y[i]);
      const double lr = p.learning_rate;
      m.w0 -= lr * r;
      for (Eigen::Index j = 0; j < d; ++j) {
        const double x = row.embedding[static_cast<std::size_t>(j)];
        if (x == 0.0) continue;
        m.w[j] -= lr * (r * x + p.l2 * m.w[j]);
        if (k) m.v.row(j) -= lr * (r * (x * q.transpose() - m.v.row(j) * (x * x)) + p.l2 * m.v.row(j));
      }
      for (auto c : row.context) {
        m.w[d + c] -= lr * (r + p.l2 * m.w[d + c]);
        if (k) m.v.row(d + c) -= lr * (r * (q.transpose() - m.v.row(d + c)) + p.l2 * m.v.row(d + c));
      }
    }
    const double loss = fm_loss_and_gradient(t, s, m, p.l2, nullptr);
    if (!std::isfinite(loss)) throw Error("diverged", "factorization machine diverged; lower the learning rate");
    m.loss_curve.push_back(loss);
  }
  return m;
}

}  // namespace ltc
