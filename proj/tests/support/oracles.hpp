#pragma once

// Brute-force reference implementations. Deliberately naive: they follow the
// textbook definitions and share no code with the library.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

inline double auc_pairwise(const std::vector<int>& y, const std::vector<double>& s) {
  double credit = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!y[i]) continue;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (y[j]) continue;
      pairs += 1.0;
      if (s[i] > s[j])
        credit += 1.0;
      else if (s[i] == s[j])
        credit += 0.5;
    }
  }
  return credit / pairs;
}

inline double f1_confusion(const std::vector<int>& y, const std::vector<int>& p) {
  long tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 1 && p[i] == 1) ++tp;
    if (y[i] == 0 && p[i] == 1) ++fp;
    if (y[i] == 1 && p[i] == 0) ++fn;
  }
  if (tp == 0) return 0.0;
  const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return 2.0 * precision * recall / (precision + recall);
}

inline double euclid(const Eigen::MatrixXd& x, Eigen::Index i, Eigen::Index j) {
  double s = 0.0;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double d = x(i, c) - x(j, c);
    s += d * d;
  }
  return std::sqrt(s);
}

// Canonical form of a partition: each label replaced by the first index that
// carries it; noise (-1) kept as -1.
inline std::vector<int> canonical(const std::vector<int>& labels) {
  std::map<int, int> first;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) {
      out[i] = -1;
      continue;
    }
    auto it = first.emplace(labels[i], static_cast<int>(i)).first;
    out[i] = it->second;
  }
  return out;
}

// Cores: at least min_pts points within eps (self included). Cores within eps
// of each other are connected. A non-core point takes the cluster of its
// nearest core within eps (lowest index on equal distance), else noise.
inline std::vector<int> dbscan(const Eigen::MatrixXd& x, double eps, std::size_t min_pts) {
  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<std::vector<double>> d(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i][j] = euclid(x, static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  std::vector<bool> core(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c = 0;
    for (std::size_t j = 0; j < n; ++j) c += d[i][j] <= eps;
    core[i] = c >= min_pts;
  }
  std::vector<int> label(n, -1);
  int next = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (!core[s] || label[s] >= 0) continue;
    std::vector<std::size_t> stack{s};
    label[s] = next;
    while (!stack.empty()) {
      auto p = stack.back();
      stack.pop_back();
      for (std::size_t q = 0; q < n; ++q)
        if (core[q] && label[q] < 0 && d[p][q] <= eps) {
          label[q] = next;
          stack.push_back(q);
        }
    }
    ++next;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
      if (core[j] && d[i][j] <= eps && d[i][j] < best) {
        best = d[i][j];
        label[i] = label[j];
      }
  }
  return label;
}

enum class Link { kAverage, kComplete, kWard };

struct MergeStep {
  std::size_t a, b;
  double distance;
};

// Recomputes every inter-cluster distance from the points at each step.
// Clusters are named by their smallest member; ties go to the smallest pair.
inline std::vector<MergeStep> agglomerative(const Eigen::MatrixXd& x, Link link) {
  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<std::vector<double>> d(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i][j] = euclid(x, static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  std::vector<std::vector<std::size_t>> clusters(n);
  for (std::size_t i = 0; i < n; ++i) clusters[i] = {i};
  auto linkage = [&](const std::vector<std::size_t>& A, const std::vector<std::size_t>& B) {
    if (link == Link::kWard) {
      Eigen::VectorXd ca = Eigen::VectorXd::Zero(x.cols()), cb = Eigen::VectorXd::Zero(x.cols());
      for (auto i : A) ca += x.row(static_cast<Eigen::Index>(i)).transpose();
      for (auto i : B) cb += x.row(static_cast<Eigen::Index>(i)).transpose();
      ca /= static_cast<double>(A.size());
      cb /= static_cast<double>(B.size());
      const double na = static_cast<double>(A.size()), nb = static_cast<double>(B.size());
      return std::sqrt(2.0 * na * nb / (na + nb)) * (ca - cb).norm();
    }
    double acc = link == Link::kAverage ? 0.0 : -1.0;
    for (auto i : A)
      for (auto j : B) {
        const double v = d[i][j];
        if (link == Link::kAverage)
          acc += v;
        else
          acc = std::max(acc, v);
      }
    return link == Link::kAverage ? acc / static_cast<double>(A.size() * B.size()) : acc;
  };
  std::vector<MergeStep> merges;
  while (clusters.size() > 1) {
    std::sort(clusters.begin(), clusters.end());
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i)
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        const double v = linkage(clusters[i], clusters[j]);
        if (v < best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    merges.push_back({clusters[bi].front(), clusters[bj].front(), best});
    clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
    std::sort(clusters[bi].begin(), clusters[bi].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  return merges;
}

// Partition after replaying the first n - k merges.
inline std::vector<int> cut(const std::vector<MergeStep>& merges, std::size_t n, std::size_t k) {
  std::vector<int> label(n);
  std::iota(label.begin(), label.end(), 0);
  for (std::size_t m = 0; m < n - k; ++m) {
    const int from = label[merges[m].b], to = label[merges[m].a];
    for (auto& l : label)
      if (l == from) l = to;
  }
  return canonical(label);
}

// Double loop over all pairs; noise excluded, singletons score 0.
inline double silhouette(const Eigen::MatrixXd& x, const std::vector<int>& labels) {
  std::set<int> ids;
  for (int l : labels)
    if (l >= 0) ids.insert(l);
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) continue;
    ++counted;
    std::size_t own = 0;
    for (int l : labels) own += l == labels[i];
    if (own < 2) continue;
    double a = 0.0;
    for (std::size_t j = 0; j < labels.size(); ++j)
      if (j != i && labels[j] == labels[i]) a += euclid(x, static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    a /= static_cast<double>(own - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c : ids) {
      if (c == labels[i]) continue;
      double s = 0.0;
      std::size_t m = 0;
      for (std::size_t j = 0; j < labels.size(); ++j)
        if (labels[j] == c) {
          s += euclid(x, static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
          ++m;
        }
      b = std::min(b, s / static_cast<double>(m));
    }
    total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(counted);
}

// Cyclic Jacobi rotations on a symmetric matrix; eigenvalues sorted descending.
inline std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a, int sweeps = 100) {
  const auto n = a.rows();
  for (int s = 0; s < sweeps; ++s) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), sn = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

inline Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& x) {
  const auto n = x.rows(), d = x.cols();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      double mi = 0.0, mj = 0.0;
      for (Eigen::Index r = 0; r < n; ++r) {
        mi += x(r, i);
        mj += x(r, j);
      }
      mi /= static_cast<double>(n);
      mj /= static_cast<double>(n);
      double s = 0.0;
      for (Eigen::Index r = 0; r < n; ++r) s += (x(r, i) - mi) * (x(r, j) - mj);
      c(i, j) = s / static_cast<double>(n - 1);
    }
  return c;
}

// Central differences of f at theta, one coordinate at a time.
inline Eigen::VectorXd numeric_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                        const Eigen::VectorXd& theta, double h = 1e-6) {
  Eigen::VectorXd g(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    Eigen::VectorXd up = theta, down = theta;
    up(i) += h;
    down(i) -= h;
    g(i) = (f(up) - f(down)) / (2.0 * h);
  }
  return g;
}

// Selected iff strictly more accepts than rejects, missing votes rejecting.
// votes: expert -> cluster -> accept, already resolved to the latest vote.
inline std::vector<int> majority(const std::map<std::string, std::map<int, bool>>& votes,
                                 const std::vector<std::string>& roster, const std::vector<int>& clusters) {
  std::vector<int> out;
  for (int c : clusters) {
    int yes = 0;
    for (const auto& e : roster) {
      auto it = votes.find(e);
      if (it == votes.end()) continue;
      auto jt = it->second.find(c);
      if (jt != it->second.end() && jt->second) ++yes;
    }
    if (2 * yes > static_cast<int>(roster.size())) out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto i, auto j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j < idx.size() && v[idx[j]] == v[idx[i]]) ++j;
      const double avg = (static_cast<double>(i) + static_cast<double>(j - 1)) / 2.0 + 1.0;
      for (std::size_t k = i; k < j; ++k) r[idx[k]] = avg;
      i = j;
    }
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / static_cast<double>(ra.size());
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / static_cast<double>(rb.size());
  double num = 0.0, da = 0.0, db = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    num += (ra[i] - ma) * (rb[i] - mb);
    da += (ra[i] - ma) * (ra[i] - ma);
    db += (rb[i] - mb) * (rb[i] - mb);
  }
  return num / std::sqrt(da * db);
}

}  // namespace oracle
