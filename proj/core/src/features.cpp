#include "ltc/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ltc {

std::vector<double> FeatureTable::dense_row(std::size_t i) const {
  std::vector<double> x(feature_dim(), 0.0);
  std::copy_n(embedding.begin() + static_cast<long>(i * embed_dim), embed_dim, x.begin());
  for (auto c : context[i]) x[embed_dim + c] = 1.0;
  return x;
}

FeatureTable FeatureTable::subset(const std::vector<std::size_t>& rows) const {
  FeatureTable out;
  out.embed_dim = embed_dim;
  out.n_context = n_context;
  out.dialogue_ids.reserve(rows.size());
  out.embedding.reserve(rows.size() * embed_dim);
  out.context.reserve(rows.size());
  out.y.reserve(rows.size());
  for (auto r : rows) {
    out.dialogue_ids.push_back(dialogue_ids[r]);
    out.embedding.insert(out.embedding.end(), embedding.begin() + static_cast<long>(r * embed_dim),
                         embedding.begin() + static_cast<long>((r + 1) * embed_dim));
    out.context.push_back(context[r]);
    out.y.push_back(y[r]);
  }
  return out;
}

FeatureTable FeatureTable::select_context(const std::vector<std::uint32_t>& variables) const {
  std::vector<std::int64_t> remap(n_context, -1);
  for (std::size_t k = 0; k < variables.size(); ++k) {
    if (variables[k] >= n_context) throw Error("invalid_argument", "context variable out of range");
    remap[variables[k]] = static_cast<std::int64_t>(k);
  }
  FeatureTable out;
  out.embed_dim = embed_dim;
  out.n_context = variables.size();
  out.dialogue_ids = dialogue_ids;
  out.embedding = embedding;
  out.y = y;
  out.context.resize(context.size());
  for (std::size_t i = 0; i < context.size(); ++i) {
    auto& dst = out.context[i];
    for (auto c : context[i])
      if (remap[c] >= 0) dst.push_back(static_cast<std::uint32_t>(remap[c]));
    std::sort(dst.begin(), dst.end());
  }
  return out;
}

void FeatureTable::push_back(std::string id, std::span<const double> emb, std::vector<std::uint32_t> ctx,
                             int label) {
  if (emb.size() != embed_dim) throw Error("dimension_mismatch", "embedding dimension mismatch");
  dialogue_ids.push_back(std::move(id));
  embedding.insert(embedding.end(), emb.begin(), emb.end());
  context.push_back(std::move(ctx));
  y.push_back(label);
}

DenseRow to_row(std::span<const double> x, std::size_t embed_dim) {
  if (x.size() < embed_dim) throw Error("dimension_mismatch", "feature vector shorter than embedding block");
  DenseRow r;
  r.embedding.assign(x.begin(), x.begin() + static_cast<long>(embed_dim));
  for (std::size_t j = embed_dim; j < x.size(); ++j) {
    if (x[j] == 1.0)
      r.context.push_back(static_cast<std::uint32_t>(j - embed_dim));
    else if (x[j] != 0.0)
      throw Error("invalid_argument", "context features must be 0 or 1");
  }
  return r;
}

FeatureTable build_features(const Corpus& corpus, const ProductId& product, const CustomerEmbeddings& embeddings,
                            const Annotations& annotations, const FeatureOptions& options,
                            FeatureSummary* summary) {
  const auto emb_index = embeddings.index();
  const auto ann_index = annotations.index();
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < corpus.dialogues.size(); ++i)
    if (corpus.dialogues[i].outcome_for(product)) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return corpus.dialogues[a].dialogue_id < corpus.dialogues[b].dialogue_id;
  });

  FeatureTable t;
  t.embed_dim = embeddings.dim;
  t.n_context = annotations.n_variables;
  FeatureSummary s;
  const std::vector<double> zeros(embeddings.dim, 0.0);
  for (auto i : order) {
    const auto& d = corpus.dialogues[i];
    auto a = ann_index.find(d.dialogue_id);
    if (a == ann_index.end())
      throw Error("missing_artifact", "missing artifact: annotations (no entry for dialogue " + d.dialogue_id + ")");
    auto e = emb_index.find(d.customer_id);
    std::span<const double> emb;
    if (e != emb_index.end()) {
      emb = embeddings.vectors[e->second];
      for (double v : emb)
        if (!std::isfinite(v)) throw Error("invalid_argument", "non-finite embedding for customer " + d.customer_id);
    } else if (options.missing == MissingEmbedding::kDrop) {
      ++s.dropped_missing_embedding;
      continue;
    } else {
      ++s.zero_filled;
      emb = zeros;
    }
    t.push_back(d.dialogue_id, emb, annotations.active[a->second], *d.outcome_for(product));
  }
  s.rows = t.size();
  if (summary) *summary = s;
  return t;
}

std::vector<double> class_weights(const std::vector<int>& y, bool balanced) {
  std::vector<double> w(y.size(), 1.0);
  if (!balanced) return w;
  const auto pos = static_cast<double>(std::count(y.begin(), y.end(), 1));
  const auto n = static_cast<double>(y.size());
  const double neg = n - pos;
  if (pos == 0 || neg == 0) return w;
  for (std::size_t i = 0; i < y.size(); ++i) w[i] = y[i] ? n / (2 * pos) : n / (2 * neg);
  return w;
}

}  // namespace ltc
