#include <algorithm>
#include <cmath>

#include "ltc/evaluation.hpp"

namespace ltc {

std::string to_string(RankCriterion c) { return c == RankCriterion::kFrequency ? "frequency" : "rate"; }

RankCriterion parse_criterion(const std::string& s) {
  if (s == "frequency" || s == "propensity_frequency") return RankCriterion::kFrequency;
  if (s == "rate" || s == "propensity_rate") return RankCriterion::kRate;
  throw Error("invalid_argument", "unknown ranking criterion: " + s + " (expected frequency or rate)");
}

std::vector<std::uint32_t> VariableRanking::ids() const {
  std::vector<std::uint32_t> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.variable_id);
  return out;
}

VariableRanking rank_variables(const Corpus& corpus, const Annotations& annotations, const ProductId& product,
                               RankCriterion criterion, const RankOptions& options) {
  const auto idx = annotations.index();
  std::vector<std::size_t> freq(annotations.n_variables, 0), co(annotations.n_variables, 0);
  for (const auto& d : corpus.dialogues) {
    auto outcome = d.outcome_for(product);
    if (!outcome) continue;
    auto it = idx.find(d.dialogue_id);
    if (it == idx.end())
      throw Error("missing_artifact", "missing artifact: annotations (no entry for dialogue " + d.dialogue_id + ")");
    for (auto v : annotations.active[it->second]) {
      ++co[v];
      if (*outcome) ++freq[v];
    }
  }
  VariableRanking r;
  r.product = product;
  r.criterion = criterion;
  for (std::uint32_t v = 0; v < annotations.n_variables; ++v) {
    RankedVariable e{v, 0.0, freq[v], co[v], false};
    if (criterion == RankCriterion::kFrequency) {
      e.score = static_cast<double>(freq[v]);
    } else {
      if (co[v] == 0) {
        r.excluded.push_back(v);
        continue;
      }
      e.score = static_cast<double>(freq[v]) / static_cast<double>(co[v]);
      e.low_support = co[v] < options.rate_min_support;
    }
    r.entries.push_back(e);
  }
  auto rate = [](const RankedVariable& e) {
    return e.co_occurring ? static_cast<double>(e.frequency) / static_cast<double>(e.co_occurring) : -1.0;
  };
  if (criterion == RankCriterion::kFrequency) {
    std::sort(r.entries.begin(), r.entries.end(), [&](const RankedVariable& a, const RankedVariable& b) {
      if (a.frequency != b.frequency) return a.frequency > b.frequency;
      if (rate(a) != rate(b)) return rate(a) > rate(b);
      return a.variable_id < b.variable_id;
    });
  } else {
    std::sort(r.entries.begin(), r.entries.end(), [](const RankedVariable& a, const RankedVariable& b) {
      if (a.low_support != b.low_support) return !a.low_support;
      if (a.score != b.score) return a.score > b.score;
      if (a.frequency != b.frequency) return a.frequency > b.frequency;
      return a.variable_id < b.variable_id;
    });
  }
  return r;
}

std::size_t quantile_count(std::size_t n, double q) {
  if (!(q >= 0.0 && q <= 100.0)) throw Error("invalid_argument", "quantile must be within [0, 100]");
  return std::min(n, static_cast<std::size_t>(std::floor(q * static_cast<double>(n) / 100.0 + 1e-9)));
}

std::vector<std::uint32_t> select_quantile(const VariableRanking& ranking, double q) {
  const auto m = quantile_count(ranking.entries.size(), q);
  std::vector<std::uint32_t> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) out.push_back(ranking.entries[i].variable_id);
  return out;
}

}  // namespace ltc
