#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ltc/features.hpp"
#include "ltc/tree.hpp"

namespace ltc {

// Logistic regression trained by full-batch gradient descent with
// Barzilai-Borwein steps and Armijo backtracking, so the loss never rises.
struct LogRegParams {
  double l2 = 1e-4;
  std::size_t max_iter = 1000;
  double tol = 1e-9;  // stop when the gradient max-norm falls below
  bool class_weighted = true;
};

struct LogRegModel {
  Eigen::VectorXd w;  // feature_dim
  double b = 0.0;
  std::vector<double> loss_curve;

  double decision(const RowView& row) const;
};

// Parameters are theta = [w, b]. Returns the weighted mean log-loss plus
// l2/2 * |w|^2 and, when grad is non-null, its gradient.
double logreg_loss_and_gradient(const FeatureTable& table, const std::vector<double>& sample_weight,
                                const Eigen::VectorXd& theta, double l2, Eigen::VectorXd* grad);
LogRegModel train_logreg(const FeatureTable& table, const LogRegParams& params);

// Degree-2 factorization machine trained by SGD on the weighted log-loss.
struct FmParams {
  std::size_t factors = 4;
  double learning_rate = 0.05;
  std::size_t epochs = 20;
  double l2 = 1e-4;
  double init_std = 0.01;
  bool class_weighted = true;
};

struct FmModel {
  double w0 = 0.0;
  Eigen::VectorXd w;  // feature_dim
  Eigen::MatrixXd v;  // feature_dim x factors
  std::vector<double> loss_curve;

  double decision(const RowView& row) const;
  // theta = [w0, w, v column-major]
  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::VectorXd& theta);
};

double fm_loss_and_gradient(const FeatureTable& table, const std::vector<double>& sample_weight, const FmModel& model,
                            double l2, Eigen::VectorXd* grad);
FmModel train_fm(const FeatureTable& table, const FmParams& params, std::uint64_t seed);

// Bagged Gini trees; the score is the fraction of trees voting class 1.
struct ForestParams {
  std::size_t n_trees = 100;
  std::size_t max_depth = 8;
  std::size_t min_samples_leaf = 5;
  std::size_t features_per_node = 0;  // 0 = sqrt(feature_dim)
  bool class_weighted = true;
  std::size_t max_bins = 32;
};

struct ForestModel {
  std::vector<Tree> trees;

  double predict(const RowView& row) const;
};

ForestModel train_forest(const FeatureTable& table, const ForestParams& params, std::uint64_t seed);

// Gradient-boosted regression trees on the logistic loss.
struct GbdtParams {
  std::size_t n_trees = 300;
  double learning_rate = 0.3;
  std::size_t max_depth = 2;
  std::size_t min_samples_leaf = 10;
  double lambda = 1.0;
  double min_child_weight = 1e-3;
  double subsample = 1.0;
  bool class_weighted = true;
  std::size_t max_bins = 32;
};

struct GbdtModel {
  double init = 0.0;
  std::vector<Tree> trees;  // leaf values already scaled by the learning rate
  std::vector<double> loss_curve;

  double decision(const RowView& row) const;
};

GbdtModel train_gbdt(const FeatureTable& table, const GbdtParams& params, std::uint64_t seed);

double sigmoid(double z);

enum class ModelKind { kLogReg, kRandomForest, kGbdt, kFactorizationMachine, kAuto };

std::string to_string(ModelKind k);
ModelKind parse_model_kind(const std::string& s);

struct ModelSpec {
  ModelKind kind = ModelKind::kGbdt;
  LogRegParams logreg;
  ForestParams forest;
  GbdtParams gbdt;
  FmParams fm;

  std::string describe() const;  // kind plus the hyperparameters that apply
};

struct SelectionLogEntry {
  std::string spec;
  std::vector<double> fold_auc;
  double mean_auc = 0.0;
  std::string error;  // non-empty when the candidate failed
};

struct PropensityModel {
  ModelSpec spec;  // the spec actually fitted
  bool auto_selected = false;
  std::size_t embed_dim = 0;
  std::size_t n_context = 0;
  std::uint64_t seed = 0;
  std::string registry_hash;
  std::variant<LogRegModel, ForestModel, GbdtModel, FmModel> impl;
  std::vector<SelectionLogEntry> selection_log;

  std::size_t feature_dim() const { return embed_dim + n_context; }
  const std::vector<double>& loss_curve() const;
  double predict(const RowView& row) const;
};

// kAuto dispatches to auto_select over default_auto_candidates() with 3 folds.
PropensityModel train(const FeatureTable& table, const ModelSpec& spec, std::uint64_t seed);
double predict_proba(const PropensityModel& model, std::span<const double> x);
std::vector<double> predict_proba(const PropensityModel& model, const FeatureTable& table);

std::vector<ModelSpec> default_auto_candidates();

// Stratified CV over the candidates; refits the best mean-AUC spec on all rows.
// Ties go to the earlier candidate.
PropensityModel auto_select(const FeatureTable& table, const std::vector<ModelSpec>& candidates,
                            std::size_t cv_folds, std::uint64_t seed);

void save_model(const PropensityModel& model, const std::filesystem::path& path);
PropensityModel load_model(const std::filesystem::path& path);

}  // namespace ltc
