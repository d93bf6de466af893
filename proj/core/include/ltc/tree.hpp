#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ltc/features.hpp"

namespace ltc {

// Quantile bin edges per embedding column; bin(x) <= b iff x <= edges[b].
struct FeatureBins {
  std::vector<std::vector<double>> edges;  // per embedding column
  std::vector<std::uint8_t> codes;         // column-major, n_rows x columns

  std::size_t n_rows = 0;
  std::uint8_t code(std::size_t row, std::size_t column) const { return codes[column * n_rows + row]; }
};

FeatureBins bin_features(const FeatureTable& table, std::size_t max_bins = 32);

// Features 0..embed_dim-1 are embedding columns (x <= threshold goes left);
// embed_dim.. are context variables (0 goes left).
struct TreeNode {
  std::int32_t feature = -1;  // -1 for a leaf
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;
};

struct Tree {
  std::vector<TreeNode> nodes;
  std::size_t embed_dim = 0;

  double predict(const RowView& row) const;
  std::size_t depth() const;
};

enum class SplitCriterion { kGradient, kGini };

struct TreeParams {
  std::size_t max_depth = 3;
  std::size_t min_samples_leaf = 1;
  double min_child_weight = 1e-3;  // hessian (gradient) or weight (gini) per child
  double lambda = 1.0;             // L2 on leaf values, gradient criterion
  double min_gain = 0.0;
  // Candidate features sampled per node; 0 = all.
  std::size_t features_per_node = 0;
};

// Per-row statistics: (gradient, hessian) for kGradient and (weight of
// class 1, weight of class 0) for kGini. Rows with both zero are ignored.
// Leaf values: -G / (H + lambda) for kGradient, class-1 weight share for kGini.
// When leaf_of_row is given (sized table.size()), the leaf index reached by
// each row in `rows` is stored there.
Tree fit_tree(const FeatureTable& table, const FeatureBins& bins, const std::vector<double>& a,
              const std::vector<double>& b, const std::vector<std::size_t>& rows, SplitCriterion criterion,
              const TreeParams& params, std::mt19937_64& rng, std::vector<std::int32_t>* leaf_of_row = nullptr);

}  // namespace ltc
