#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "ltc/evaluation.hpp"
#include "ltc/models.hpp"

namespace ltc {

using nlohmann::json;

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::kLogReg: return "logreg";
    case ModelKind::kRandomForest: return "rf";
    case ModelKind::kGbdt: return "gbdt";
    case ModelKind::kFactorizationMachine: return "fm";
    case ModelKind::kAuto: return "auto";
  }
  return "unknown";
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "logreg") return ModelKind::kLogReg;
  if (s == "rf" || s == "random_forest") return ModelKind::kRandomForest;
  if (s == "gbdt") return ModelKind::kGbdt;
  if (s == "fm" || s == "factorization_machine") return ModelKind::kFactorizationMachine;
  if (s == "auto") return ModelKind::kAuto;
  throw Error("invalid_argument", "unknown model kind: " + s + " (expected logreg, rf, gbdt, fm or auto)");
}

namespace {

json params_json(const ModelSpec& s) {
  switch (s.kind) {
    case ModelKind::kLogReg:
      return {{"l2", s.logreg.l2}, {"max_iter", s.logreg.max_iter}, {"tol", s.logreg.tol},
              {"class_weighted", s.logreg.class_weighted}};
    case ModelKind::kRandomForest:
      return {{"n_trees", s.forest.n_trees},
              {"max_depth", s.forest.max_depth},
              {"min_samples_leaf", s.forest.min_samples_leaf},
              {"features_per_node", s.forest.features_per_node},
              {"class_weighted", s.forest.class_weighted},
              {"max_bins", s.forest.max_bins}};
    case ModelKind::kGbdt:
      return {{"n_trees", s.gbdt.n_trees},
              {"learning_rate", s.gbdt.learning_rate},
              {"max_depth", s.gbdt.max_depth},
              {"min_samples_leaf", s.gbdt.min_samples_leaf},
              {"lambda", s.gbdt.lambda},
              {"min_child_weight", s.gbdt.min_child_weight},
              {"subsample", s.gbdt.subsample},
              {"class_weighted", s.gbdt.class_weighted},
              {"max_bins", s.gbdt.max_bins}};
    case ModelKind::kFactorizationMachine:
      return {{"factors", s.fm.factors},     {"learning_rate", s.fm.learning_rate},
              {"epochs", s.fm.epochs},       {"l2", s.fm.l2},
              {"init_std", s.fm.init_std},   {"class_weighted", s.fm.class_weighted}};
    case ModelKind::kAuto: return json::object();
  }
  return json::object();
}

ModelSpec spec_from_json(const std::string& kind, const json& p) {
  ModelSpec s;
  s.kind = parse_model_kind(kind);
  switch (s.kind) {
    case ModelKind::kLogReg:
      s.logreg.l2 = p.at("l2");
      s.logreg.max_iter = p.at("max_iter");
      s.logreg.tol = p.at("tol");
      s.logreg.class_weighted = p.at("class_weighted");
      break;
    case ModelKind::kRandomForest:
      s.forest.n_trees = p.at("n_trees");
      s.forest.max_depth = p.at("max_depth");
      s.forest.min_samples_leaf = p.at("min_samples_leaf");
      s.forest.features_per_node = p.at("features_per_node");
      s.forest.class_weighted = p.at("class_weighted");
      s.forest.max_bins = p.at("max_bins");
      break;
    case ModelKind::kGbdt:
      s.gbdt.n_trees = p.at("n_trees");
      s.gbdt.learning_rate = p.at("learning_rate");
      s.gbdt.max_depth = p.at("max_depth");
      s.gbdt.min_samples_leaf = p.at("min_samples_leaf");
      s.gbdt.lambda = p.at("lambda");
      s.gbdt.min_child_weight = p.at("min_child_weight");
      s.gbdt.subsample = p.at("subsample");
      s.gbdt.class_weighted = p.at("class_weighted");
      s.gbdt.max_bins = p.at("max_bins");
      break;
    case ModelKind::kFactorizationMachine:
      s.fm.factors = p.at("factors");
      s.fm.learning_rate = p.at("learning_rate");
      s.fm.epochs = p.at("epochs");
      s.fm.l2 = p.at("l2");
      s.fm.init_std = p.at("init_std");
      s.fm.class_weighted = p.at("class_weighted");
      break;
    case ModelKind::kAuto: break;
  }
  return s;
}

void validate(const FeatureTable& t) {
  if (t.size() == 0) throw Error("invalid_argument", "no training rows");
  std::size_t pos = 0;
  for (int y : t.y) {
    if (y != 0 && y != 1) throw Error("invalid_argument", "labels must be 0 or 1");
    pos += static_cast<std::size_t>(y);
  }
  if (pos == 0 || pos == t.size()) throw Error("single_class", "training labels contain a single class");
  for (double v : t.embedding)
    if (!std::isfinite(v)) throw Error("invalid_argument", "non-finite feature value");
  for (const auto& ctx : t.context)
    for (auto c : ctx)
      if (c >= t.n_context) throw Error("invalid_argument", "context index out of range");
}

PropensityModel fit(const FeatureTable& t, const ModelSpec& spec, std::uint64_t seed) {
  PropensityModel m;
  m.spec = spec;
  m.embed_dim = t.embed_dim;
  m.n_context = t.n_context;
  m.seed = seed;
  switch (spec.kind) {
    case ModelKind::kLogReg: m.impl = train_logreg(t, spec.logreg); break;
    case ModelKind::kRandomForest: m.impl = train_forest(t, spec.forest, seed); break;
    case ModelKind::kGbdt: m.impl = train_gbdt(t, spec.gbdt, seed); break;
    case ModelKind::kFactorizationMachine: m.impl = train_fm(t, spec.fm, seed); break;
    case ModelKind::kAuto: throw Error("invalid_argument", "auto is not a concrete model kind");
  }
  return m;
}

json tree_json(const Tree& t) {
  json f = json::array(), th = json::array(), l = json::array(), r = json::array(), v = json::array();
  for (const auto& n : t.nodes) {
    f.push_back(n.feature);
    th.push_back(n.threshold);
    l.push_back(n.left);
    r.push_back(n.right);
    v.push_back(n.value);
  }
  return {{"feature", f}, {"threshold", th}, {"left", l}, {"right", r}, {"value", v}};
}

Tree tree_from_json(const json& j, std::size_t embed_dim) {
  Tree t;
  t.embed_dim = embed_dim;
  const auto& f = j.at("feature");
  const std::size_t n = f.size();
  const auto& th = j.at("threshold");
  const auto& l = j.at("left");
  const auto& r = j.at("right");
  const auto& v = j.at("value");
  if (th.size() != n || l.size() != n || r.size() != n || v.size() != n)
    throw Error("malformed", "tree arrays differ in length");
  for (std::size_t k = 0; k < n; ++k) {
    TreeNode node{f[k].get<std::int32_t>(), th[k].get<double>(), l[k].get<std::int32_t>(), r[k].get<std::int32_t>(),
                  v[k].get<double>()};
    if (node.feature >= 0 && (node.left <= static_cast<std::int32_t>(k) || node.right <= static_cast<std::int32_t>(k) ||
                              node.left >= static_cast<std::int32_t>(n) || node.right >= static_cast<std::int32_t>(n)))
      throw Error("malformed", "tree child index out of range");
    t.nodes.push_back(node);
  }
  if (t.nodes.empty()) throw Error("malformed", "empty tree");
  return t;
}

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd from_vec(const json& j) {
  auto v = j.get<std::vector<double>>();
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string ModelSpec::describe() const {
  std::ostringstream s;
  s << to_string(kind);
  const auto p = params_json(*this);
  if (!p.empty()) {
    s << '(';
    bool first = true;
    for (auto it = p.begin(); it != p.end(); ++it) {
      s << (first ? "" : ",") << it.key() << '=' << it.value().dump();
      first = false;
    }
    s << ')';
  }
  return s.str();
}

const std::vector<double>& PropensityModel::loss_curve() const {
  static const std::vector<double> kNone;
  if (auto* m = std::get_if<LogRegModel>(&impl)) return m->loss_curve;
  if (auto* m = std::get_if<GbdtModel>(&impl)) return m->loss_curve;
  if (auto* m = std::get_if<FmModel>(&impl)) return m->loss_curve;
  return kNone;
}

double PropensityModel::predict(const RowView& row) const {
  if (row.embedding.size() != embed_dim)
    throw Error("dimension_mismatch", "expected embedding dimension " + std::to_string(embed_dim) + ", got " +
                                          std::to_string(row.embedding.size()));
  if (!row.context.empty() && row.context.back() >= n_context)
    throw Error("dimension_mismatch", "context index beyond model feature dimension");
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ForestModel>)
          return m.predict(row);
        else
          return sigmoid(m.decision(row));
      },
      impl);
}

PropensityModel train(const FeatureTable& table, const ModelSpec& spec, std::uint64_t seed) {
  validate(table);
  if (spec.kind == ModelKind::kAuto) return auto_select(table, default_auto_candidates(), 3, seed);
  return fit(table, spec, seed);
}

double predict_proba(const PropensityModel& model, std::span<const double> x) {
  if (x.size() != model.feature_dim())
    throw Error("dimension_mismatch", "expected " + std::to_string(model.feature_dim()) + " features, got " +
                                          std::to_string(x.size()));
  const auto row = to_row(x, model.embed_dim);
  return model.predict(row.view());
}

std::vector<double> predict_proba(const PropensityModel& model, const FeatureTable& table) {
  if (table.embed_dim != model.embed_dim || table.n_context != model.n_context)
    throw Error("dimension_mismatch", "feature table does not match model dimension");
  std::vector<double> out(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) out[i] = model.predict(table.row(i));
  return out;
}

std::vector<ModelSpec> default_auto_candidates() {
  std::vector<ModelSpec> c;
  ModelSpec lr;
  lr.kind = ModelKind::kLogReg;
  lr.logreg.l2 = 1e-3;
  lr.logreg.max_iter = 300;
  lr.logreg.tol = 1e-6;
  c.push_back(lr);
  ModelSpec gb;
  gb.kind = ModelKind::kGbdt;
  c.push_back(gb);
  ModelSpec gb_deep = gb;
  gb_deep.gbdt.max_depth = 5;
  gb_deep.gbdt.n_trees = 60;
  gb_deep.gbdt.learning_rate = 0.1;
  c.push_back(gb_deep);
  ModelSpec rf;
  rf.kind = ModelKind::kRandomForest;
  rf.forest.n_trees = 60;
  c.push_back(rf);
  ModelSpec fm;
  fm.kind = ModelKind::kFactorizationMachine;
  fm.fm.epochs = 10;
  c.push_back(fm);
  return c;
}

PropensityModel auto_select(const FeatureTable& table, const std::vector<ModelSpec>& candidates,
                            std::size_t cv_folds, std::uint64_t seed) {
  validate(table);
  if (candidates.empty()) throw Error("invalid_argument", "auto selection needs at least one candidate");
  for (const auto& c : candidates)
    if (c.kind == ModelKind::kAuto) throw Error("invalid_argument", "auto candidates must be concrete kinds");
  const auto folds = kfold_split(table.y, cv_folds, mix_seed(seed, 0xa070));
  const std::size_t n_cells = candidates.size() * folds.size();
  std::vector<double> auc(n_cells, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> errors(n_cells);
  parallel_for(n_cells, [&](std::size_t cell) {
    const std::size_t c = cell / folds.size(), f = cell % folds.size();
    std::vector<std::size_t> train_rows;
    for (std::size_t g = 0; g < folds.size(); ++g)
      if (g != f) train_rows.insert(train_rows.end(), folds[g].begin(), folds[g].end());
    std::sort(train_rows.begin(), train_rows.end());
    try {
      const auto train_t = table.subset(train_rows);
      const auto test_t = table.subset(folds[f]);
      validate(train_t);
      const auto m = fit(train_t, candidates[c], mix_seed(seed, cell + 1));
      auc[cell] = roc_auc(test_t.y, predict_proba(m, test_t));
    } catch (const std::exception& e) {
      errors[cell] = e.what();
    }
  });
  std::vector<SelectionLogEntry> log;
  std::size_t best = candidates.size();
  double best_auc = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    SelectionLogEntry e;
    e.spec = candidates[c].describe();
    for (std::size_t f = 0; f < folds.size(); ++f) {
      const auto cell = c * folds.size() + f;
      if (!errors[cell].empty() && e.error.empty()) e.error = errors[cell];
      e.fold_auc.push_back(auc[cell]);
    }
    if (e.error.empty()) {
      e.mean_auc = mean_std(e.fold_auc).mean;
      if (e.mean_auc > best_auc) {
        best_auc = e.mean_auc;
        best = c;
      }
    } else {
      e.mean_auc = std::numeric_limits<double>::quiet_NaN();
    }
    log.push_back(std::move(e));
  }
  if (best == candidates.size()) throw Error("training_failed", "every auto candidate failed: " + log.front().error);
  auto model = fit(table, candidates[best], seed);
  model.auto_selected = true;
  model.selection_log = std::move(log);
  return model;
}

void save_model(const PropensityModel& m, const std::filesystem::path& path) {
  json j;
  j["format"] = "ltc-propensity-model";
  j["version"] = 1;
  j["kind"] = to_string(m.spec.kind);
  j["hyperparameters"] = params_json(m.spec);
  j["auto_selected"] = m.auto_selected;
  j["embed_dim"] = m.embed_dim;
  j["n_context"] = m.n_context;
  j["feature_dim"] = m.feature_dim();
  j["seed"] = m.seed;
  j["registry_hash"] = m.registry_hash;
  j["loss_curve"] = m.loss_curve();
  json params;
  std::visit(
      [&](const auto& impl) {
        using T = std::decay_t<decltype(impl)>;
        if constexpr (std::is_same_v<T, LogRegModel>) {
          params = {{"w", to_vec(impl.w)}, {"b", impl.b}};
        } else if constexpr (std::is_same_v<T, FmModel>) {
          params = {{"w0", impl.w0},
                    {"w", to_vec(impl.w)},
                    {"factors", impl.v.cols()},
                    {"v", std::vector<double>(impl.v.data(), impl.v.data() + impl.v.size())}};
        } else if constexpr (std::is_same_v<T, GbdtModel>) {
          params["init"] = impl.init;
          params["trees"] = json::array();
          for (const auto& t : impl.trees) params["trees"].push_back(tree_json(t));
        } else {
          params["trees"] = json::array();
          for (const auto& t : impl.trees) params["trees"].push_back(tree_json(t));
        }
      },
      m.impl);
  j["parameters"] = std::move(params);
  json log = json::array();
  for (const auto& e : m.selection_log) {
    json fa = json::array();
    for (double a : e.fold_auc) fa.push_back(std::isfinite(a) ? json(a) : json(nullptr));
    log.push_back({{"spec", e.spec},
                   {"fold_auc", fa},
                   {"mean_auc", std::isfinite(e.mean_auc) ? json(e.mean_auc) : json(nullptr)},
                   {"error", e.error}});
  }
  j["selection_log"] = std::move(log);
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw Error("unwritable", "cannot write " + path.string());
  out << j.dump() << '\n';
}

PropensityModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("missing_artifact", "missing artifact: model (" + path.string() + ")");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("malformed", "model bundle is not valid JSON: " + std::string(e.what()));
  }
  if (j.value("format", "") != "ltc-propensity-model") throw Error("malformed", "not a propensity model bundle");
  PropensityModel m;
  m.spec = spec_from_json(j.at("kind"), j.at("hyperparameters"));
  m.auto_selected = j.at("auto_selected");
  m.embed_dim = j.at("embed_dim");
  m.n_context = j.at("n_context");
  m.seed = j.at("seed");
  m.registry_hash = j.at("registry_hash");
  if (j.at("feature_dim").get<std::size_t>() != m.feature_dim())
    throw Error("malformed", "feature_dim disagrees with embed_dim + n_context");
  const auto& p = j.at("parameters");
  const auto D = static_cast<Eigen::Index>(m.feature_dim());
  auto curve = j.at("loss_curve").get<std::vector<double>>();
  switch (m.spec.kind) {
    case ModelKind::kLogReg: {
      LogRegModel lr;
      lr.w = from_vec(p.at("w"));
      lr.b = p.at("b");
      lr.loss_curve = curve;
      if (lr.w.size() != D) throw Error("malformed", "logreg weight size mismatch");
      m.impl = std::move(lr);
      break;
    }
    case ModelKind::kFactorizationMachine: {
      FmModel fm;
      fm.w0 = p.at("w0");
      fm.w = from_vec(p.at("w"));
      const auto k = p.at("factors").get<Eigen::Index>();
      auto v = p.at("v").get<std::vector<double>>();
      if (fm.w.size() != D || static_cast<Eigen::Index>(v.size()) != D * k)
        throw Error("malformed", "fm parameter size mismatch");
      fm.v = Eigen::Map<Eigen::MatrixXd>(v.data(), D, k);
      fm.loss_curve = curve;
      m.impl = std::move(fm);
      break;
    }
    case ModelKind::kGbdt: {
      GbdtModel g;
      g.init = p.at("init");
      for (const auto& t : p.at("trees")) g.trees.push_back(tree_from_json(t, m.embed_dim));
      g.loss_curve = curve;
      m.impl = std::move(g);
      break;
    }
    case ModelKind::kRandomForest: {
      ForestModel f;
      for (const auto& t : p.at("trees")) f.trees.push_back(tree_from_json(t, m.embed_dim));
      m.impl = std::move(f);
      break;
    }
    case ModelKind::kAuto: throw Error("malformed", "model bundle kind cannot be auto");
  }
  for (const auto& e : j.at("selection_log")) {
    SelectionLogEntry s;
    s.spec = e.at("spec");
    for (const auto& a : e.at("fold_auc"))
      s.fold_auc.push_back(a.is_null() ? std::numeric_limits<double>::quiet_NaN() : a.get<double>());
    s.mean_auc = e.at("mean_auc").is_null() ? std::numeric_limits<double>::quiet_NaN() : e.at("mean_auc").get<double>();
    s.error = e.at("error");
    m.selection_log.push_back(std::move(s));
  }
  return m;
}

}  // namespace ltc
