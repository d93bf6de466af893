#include <algorithm>
#include <cmath>
#include <numeric>

#include "ltc/evaluation.hpp"

namespace ltc {

Confusion confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  if (y_true.size() != y_pred.size()) throw Error("dimension_mismatch", "label and prediction lengths differ");
  Confusion c;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i])
      (y_pred[i] ? c.tp : c.fn)++;
    else
      (y_pred[i] ? c.fp : c.tn)++;
  }
  return c;
}

double f1_score(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  if (y_true.empty()) throw Error("invalid_argument", "f1 of an empty sample");
  const auto c = confusion(y_true, y_pred);
  const std::size_t denom = 2 * c.tp + c.fp + c.fn;
  return denom ? 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom) : 0.0;
}

double roc_auc(const std::vector<int>& y_true, const std::vector<double>& scores) {
  if (y_true.size() != scores.size()) throw Error("dimension_mismatch", "label and score lengths differ");
  const std::size_t n = y_true.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Twice the Mann-Whitney U in integers: each positive earns 2 per lower
  // negative and 1 per tied negative.
  std::uint64_t twice_u = 0, neg_below = 0, n_pos = 0, n_neg = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    std::uint64_t pos_group = 0, neg_group = 0;
    while (j < n && scores[order[j]] == scores[order[i]]) {
      if (std::isnan(scores[order[j]])) throw Error("invalid_argument", "NaN score");
      (y_true[order[j]] ? pos_group : neg_group)++;
      ++j;
    }
    twice_u += pos_group * (2 * neg_below + neg_group);
    neg_below += neg_group;
    n_pos += pos_group;
    n_neg += neg_group;
    i = j;
  }
  if (n_pos == 0 || n_neg == 0) throw Error("single_class", "ROC-AUC needs both classes");
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

std::vector<int> threshold_scores(const std::vector<double>& scores, double threshold) {
  std::vector<int> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] >= threshold ? 1 : 0;
  return out;
}

MeanStd mean_std(const std::vector<double>& v) {
  MeanStd r;
  if (v.empty()) return {std::nan(""), std::nan("")};
  r.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    r.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return r;
}

}  // namespace ltc
