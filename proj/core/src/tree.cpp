#include "ltc/tree.hpp"

#include <algorithm>
#include <numeric>

namespace ltc {

double Tree::predict(const RowView& row) const {
  std::int32_t k = 0;
  while (nodes[k].feature >= 0) {
    const auto& n = nodes[k];
    const auto f = static_cast<std::size_t>(n.feature);
    bool left;
    if (f < embed_dim)
      left = row.embedding[f] <= n.threshold;
    else
      left = !std::binary_search(row.context.begin(), row.context.end(), static_cast<std::uint32_t>(f - embed_dim));
    k = left ? n.left : n.right;
  }
  return nodes[k].value;
}

std::size_t Tree::depth() const {
  std::vector<std::size_t> d(nodes.size(), 0);
  std::size_t best = 0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    best = std::max(best, d[k]);
    if (nodes[k].feature >= 0) {
      d[static_cast<std::size_t>(nodes[k].left)] = d[k] + 1;
      d[static_cast<std::size_t>(nodes[k].right)] = d[k] + 1;
    }
  }
  return best;
}

namespace {

struct Stat {
  double a = 0.0, b = 0.0;
  std::size_t n = 0;

  void add(double x, double y) {
    a += x;
    b += y;
    ++n;
  }
  void add(const Stat& o) {
    a += o.a;
    b += o.b;
    n += o.n;
  }
  Stat minus(const Stat& o) const { return {a - o.a, b - o.b, n - o.n}; }
};

// Histograms of one node: embedding bins laid out per feature, then one
// "value 1" cell per context variable.
struct Histogram {
  Stat total;
  std::vector<Stat> dense;
  std::vector<Stat> context;

  void subtract_from(const Histogram& parent) {
    total = parent.total.minus(total);
    for (std::size_t i = 0; i < dense.size(); ++i) dense[i] = parent.dense[i].minus(dense[i]);
    for (std::size_t i = 0; i < context.size(); ++i) context[i] = parent.context[i].minus(context[i]);
  }
};

class Builder {
 public:
  Builder(const FeatureTable& t, const FeatureBins& bins, const std::vector<double>& a, const std::vector<double>& b,
          SplitCriterion criterion, const TreeParams& params, std::mt19937_64& rng,
          std::vector<std::int32_t>* leaf_of_row)
      : t_(t), bins_(bins), a_(a), b_(b), criterion_(criterion), p_(params), rng_(rng), leaf_of_row_(leaf_of_row) {
    features_.resize(t.feature_dim());
    std::iota(features_.begin(), features_.end(), 0);
    candidate_.assign(t.feature_dim(), 1);
    offset_.resize(t.embed_dim + 1, 0);
    for (std::size_t f = 0; f < t.embed_dim; ++f) offset_[f + 1] = offset_[f] + bins.edges[f].size() + 1;
    sampling_ = p_.features_per_node != 0 && p_.features_per_node < t.feature_dim();
  }

  Tree build(std::vector<std::size_t> rows) {
    tree_.embed_dim = t_.embed_dim;
    Histogram h;
    if (sampling_)
      for (auto r : rows) h.total.add(a_[r], b_[r]);
    else
      h = histogram(rows);
    grow(std::move(rows), std::move(h), 0);
    return std::move(tree_);
  }

 private:
  double score(const Stat& s) const {
    if (criterion_ == SplitCriterion::kGradient) return s.a * s.a / (s.b + p_.lambda);
    const double w = s.a + s.b;
    if (w <= 0) return 0.0;
    return (s.a * s.a + s.b * s.b) / w;  // w * (1 - gini)
  }

  double child_weight(const Stat& s) const { return criterion_ == SplitCriterion::kGradient ? s.b : s.a + s.b; }

  double leaf_value(const Stat& s) const {
    if (criterion_ == SplitCriterion::kGradient) return -s.a / (s.b + p_.lambda);
    const double w = s.a + s.b;
    return w > 0 ? s.a / w : 0.0;
  }

  bool admissible(const Stat& l, const Stat& r) const {
    return l.n >= p_.min_samples_leaf && r.n >= p_.min_samples_leaf && child_weight(l) >= p_.min_child_weight &&
           child_weight(r) >= p_.min_child_weight;
  }

  void sample_features() {
    const std::size_t total = features_.size();
    std::fill(candidate_.begin(), candidate_.end(), 0);
    for (std::size_t k = 0; k < p_.features_per_node; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, total - 1);
      std::swap(features_[k], features_[pick(rng_)]);
      candidate_[features_[k]] = 1;
    }
  }

  // Histogram over the current candidate features.
  Histogram histogram(const std::vector<std::size_t>& rows) const {
    Histogram h;
    h.dense.assign(offset_.back(), Stat{});
    h.context.assign(t_.n_context, Stat{});
    for (auto r : rows) h.total.add(a_[r], b_[r]);
    const std::size_t d = t_.embed_dim;
    for (std::size_t f = 0; f < d; ++f) {
      if (!candidate_[f] || bins_.edges[f].empty()) continue;
      Stat* cells = h.dense.data() + offset_[f];
      const std::uint8_t* codes = bins_.codes.data() + f * bins_.n_rows;
      for (auto r : rows) cells[codes[r]].add(a_[r], b_[r]);
    }
    for (auto r : rows)
      for (auto c : t_.context[r])
        if (candidate_[d + c]) h.context[c].add(a_[r], b_[r]);
    return h;
  }

  void grow(std::vector<std::size_t> rows, Histogram hist, std::size_t depth) {
    const Stat total = hist.total;
    const auto id = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.push_back({-1, 0.0, -1, -1, leaf_value(total)});
    auto make_leaf = [&] {
      if (leaf_of_row_)
        for (auto r : rows) (*leaf_of_row_)[r] = id;
    };
    if (depth >= p_.max_depth || total.n < 2 * p_.min_samples_leaf) return make_leaf();

    if (sampling_) {
      sample_features();
      hist = histogram(rows);
    }
    const std::size_t d = t_.embed_dim;
    const double parent = score(total);
    double best_gain = p_.min_gain;
    std::int64_t best_feature = -1;
    double best_threshold = 0.0;

    for (std::size_t f = 0; f < d; ++f) {
      if (!candidate_[f]) continue;
      const auto& edges = bins_.edges[f];
      const Stat* cells = hist.dense.data() + offset_[f];
      Stat left;
      for (std::size_t bin = 0; bin < edges.size(); ++bin) {
        left.add(cells[bin]);
        const Stat right = total.minus(left);
        if (!admissible(left, right)) continue;
        const double gain = score(left) + score(right) - parent;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<std::int64_t>(f);
          best_threshold = edges[bin];
        }
      }
    }
    for (std::size_t c = 0; c < t_.n_context; ++c) {
      if (!candidate_[d + c] || hist.context[c].n == 0) continue;
      const Stat& right = hist.context[c];
      const Stat left = total.minus(right);
      if (!admissible(left, right)) continue;
      const double gain = score(left) + score(right) - parent;
      if (gain > best_gain) {
        best_gain = gain;
        best_feature = static_cast<std::int64_t>(d + c);
        best_threshold = 0.5;
      }
    }
    if (best_feature < 0) return make_leaf();

    std::vector<std::size_t> left_rows, right_rows;
    const auto f = static_cast<std::size_t>(best_feature);
    for (auto r : rows) {
      bool left;
      if (f < d)
        left = t_.embedding[r * d + f] <= best_threshold;
      else
        left = !std::binary_search(t_.context[r].begin(), t_.context[r].end(), static_cast<std::uint32_t>(f - d));
      (left ? left_rows : right_rows).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    tree_.nodes[id].feature = static_cast<std::int32_t>(f);
    tree_.nodes[id].threshold = best_threshold;

    Histogram left_hist, right_hist;
    const bool children_split = depth + 1 < p_.max_depth;
    if (children_split && !sampling_) {
      // Build the smaller child directly, derive the larger one.
      const bool left_small = left_rows.size() <= right_rows.size();
      Histogram small = histogram(left_small ? left_rows : right_rows);
      Histogram large = small;
      large.subtract_from(hist);
      left_hist = left_small ? std::move(small) : std::move(large);
      right_hist = left_small ? std::move(large) : std::move(small);
    } else {
      for (auto r : left_rows) left_hist.total.add(a_[r], b_[r]);
      for (auto r : right_rows) right_hist.total.add(a_[r], b_[r]);
    }
    hist = Histogram{};
    const auto l = static_cast<std::int32_t>(tree_.nodes.size());
    grow(std::move(left_rows), std::move(left_hist), depth + 1);
    const auto r = static_cast<std::int32_t>(tree_.nodes.size());
    grow(std::move(right_rows), std::move(right_hist), depth + 1);
    tree_.nodes[id].left = l;
    tree_.nodes[id].right = r;
  }

  const FeatureTable& t_;
  const FeatureBins& bins_;
  const std::vector<double>& a_;
  const std::vector<double>& b_;
  SplitCriterion criterion_;
  TreeParams p_;
  std::mt19937_64& rng_;
  std::vector<std::int32_t>* leaf_of_row_;
  Tree tree_;
  std::vector<std::size_t> features_;
  std::vector<std::uint8_t> candidate_;
  std::vector<std::size_t> offset_;
  bool sampling_ = false;
};

}  // namespace

Tree fit_tree(const FeatureTable& table, const FeatureBins& bins, const std::vector<double>& a,
              const std::vector<double>& b, const std::vector<std::size_t>& rows, SplitCriterion criterion,
              const TreeParams& params, std::mt19937_64& rng, std::vector<std::int32_t>* leaf_of_row) {
  if (a.size() != table.size() || b.size() != table.size())
    throw Error("invalid_argument", "row statistics do not match table size");
  if (rows.empty()) throw Error("invalid_argument", "cannot fit a tree on zero rows");
  if (leaf_of_row && leaf_of_row->size() != table.size())
    throw Error("invalid_argument", "leaf_of_row must be sized like the table");
  return Builder(table, bins, a, b, criterion, params, rng, leaf_of_row).build(rows);
}

}  // namespace ltc
