#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ltc/annotation.hpp"
#include "ltc/binary_io.hpp"
#include "ltc/corpus.hpp"

namespace ltc {

// Customer embeddings keyed by customer_id.
using CustomerEmbeddings = KeyedVectors;

// One feature row without copying: dense embedding plus the sorted ids of
// the context variables that are 1.
struct RowView {
  std::span<const double> embedding;
  std::span<const std::uint32_t> context;
};

// Rows x = [embedding | context]. The embedding block is dense; the binary
// context block is stored as sorted active indices.
struct FeatureTable {
  std::size_t embed_dim = 0;
  std::size_t n_context = 0;
  std::vector<std::string> dialogue_ids;
  std::vector<double> embedding;  // row-major, size() x embed_dim
  std::vector<std::vector<std::uint32_t>> context;
  std::vector<int> y;

  std::size_t size() const { return y.size(); }
  std::size_t feature_dim() const { return embed_dim + n_context; }
  RowView row(std::size_t i) const {
    return {std::span<const double>(embedding.data() + i * embed_dim, embed_dim), context[i]};
  }
  std::vector<double> dense_row(std::size_t i) const;

  FeatureTable subset(const std::vector<std::size_t>& rows) const;
  // Keeps the listed context variables, renumbered 0..m-1 in the given order.
  FeatureTable select_context(const std::vector<std::uint32_t>& variables) const;
  void push_back(std::string id, std::span<const double> emb, std::vector<std::uint32_t> ctx, int label);
};

// Converts a dense feature vector to a row view; context entries must be 0 or 1.
struct DenseRow {
  std::vector<double> embedding;
  std::vector<std::uint32_t> context;
  RowView view() const { return {embedding, context}; }
};
DenseRow to_row(std::span<const double> x, std::size_t embed_dim);

enum class MissingEmbedding { kDrop, kZero };

struct FeatureOptions {
  MissingEmbedding missing = MissingEmbedding::kDrop;
};

struct FeatureSummary {
  std::size_t rows = 0;
  std::size_t dropped_missing_embedding = 0;
  std::size_t zero_filled = 0;
};

// One row per dialogue offering `product`, ordered by dialogue_id.
FeatureTable build_features(const Corpus& corpus, const ProductId& product, const CustomerEmbeddings& embeddings,
                            const Annotations& annotations, const FeatureOptions& options = {},
                            FeatureSummary* summary = nullptr);

// N / (2 N_class) weights so both classes carry equal total weight.
std::vector<double> class_weights(const std::vector<int>& y, bool balanced);

}  // namespace ltc
