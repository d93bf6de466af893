#include <algorithm>
#include <random>
#include <sstream>

#include "ltc/evaluation.hpp"
#include "ltc/hashing.hpp"

namespace ltc {

std::vector<std::vector<std::size_t>> kfold_split(const std::vector<int>& labels, std::size_t k,
                                                  std::uint64_t seed) {
  if (k < 2) throw Error("invalid_argument", "k-fold needs k >= 2");
  if (labels.size() < k)
    throw Error("invalid_argument",
                "cannot split " + std::to_string(labels.size()) + " rows into " + std::to_string(k) + " folds");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
  std::mt19937_64 rng(seed);
  std::shuffle(pos.begin(), pos.end(), rng);
  std::shuffle(neg.begin(), neg.end(), rng);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t next = 0;
  for (const auto* group : {&pos, &neg})
    for (auto i : *group) {
      folds[next].push_back(i);
      next = (next + 1) % k;
    }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
  return kfold_split(std::vector<int>(n, 0), k, seed);
}

std::string fold_hash(const std::vector<std::vector<std::size_t>>& folds, std::size_t n) {
  std::vector<std::size_t> fold_of(n, folds.size());
  for (std::size_t f = 0; f < folds.size(); ++f)
    for (auto i : folds[f]) fold_of.at(i) = f;
  std::ostringstream s;
  for (auto f : fold_of) s << f << ',';
  return sha256_hex(s.str());
}

}  // namespace ltc
