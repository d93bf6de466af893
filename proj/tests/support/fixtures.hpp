#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ltc/corpus.hpp"
#include "ltc/features.hpp"

namespace fixture {

inline ltc::Dialogue dialogue(std::string id, std::vector<std::string> customer_lines,
                              std::vector<std::pair<std::string, int>> offers, std::string customer = {}) {
  ltc::Dialogue d;
  d.dialogue_id = id;
  d.customer_id = customer.empty() ? "c_" + id : customer;
  std::size_t idx = 0;
  d.utterances.push_back({ltc::Speaker::kManager, "hello, how can I help", idx++});
  for (auto& line : customer_lines) {
    d.utterances.push_back({ltc::Speaker::kCustomer, std::move(line), idx++});
    d.utterances.push_back({ltc::Speaker::kManager, "I see", idx++});
  }
  for (auto& [p, o] : offers) d.offers.push_back({p, o});
  return d;
}

// Gaussian blobs in `dim` dimensions, `per` points each, centres 6 sd apart.
inline Eigen::MatrixXd blobs(std::size_t k, std::size_t per, std::size_t dim, std::mt19937_64& rng, double spread = 1.0) {
  std::normal_distribution<double> g(0.0, spread);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(k * per), static_cast<Eigen::Index>(dim));
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t i = 0; i < per; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        x(static_cast<Eigen::Index>(c * per + i), static_cast<Eigen::Index>(j)) =
            (j == c % dim ? 6.0 * static_cast<double>(c / dim + 1) : 0.0) + g(rng);
  return x;
}

// Logistic data: y depends on the first embedding coordinate and context 0.
inline ltc::FeatureTable table(std::size_t n, std::size_t embed_dim, std::size_t n_context, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::bernoulli_distribution coin(0.3);
  std::uniform_real_distribution<double> u;
  ltc::FeatureTable t;
  t.embed_dim = embed_dim;
  t.n_context = n_context;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> e(embed_dim);
    for (auto& v : e) v = g(rng);
    std::vector<std::uint32_t> ctx;
    for (std::uint32_t c = 0; c < n_context; ++c)
      if (coin(rng)) ctx.push_back(c);
    double z = -0.5 + 1.5 * (embed_dim ? e[0] : 0.0) + (!ctx.empty() && ctx[0] == 0 ? 2.0 : 0.0);
    int y = u(rng) < 1.0 / (1.0 + std::exp(-z)) ? 1 : 0;
    t.push_back("d" + std::to_string(i), e, std::move(ctx), y);
  }
  return t;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("ltc_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixture
