#include "sweep_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"

namespace ltc::cli {

using nlohmann::json;

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number(const json& j) { return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>(); }

json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

std::vector<double> numbers(const json& j) {
  std::vector<double> out;
  for (const auto& x : j) out.push_back(number(x));
  return out;
}

json to_json(const MeanStd& m) { return {{"mean", number(m.mean)}, {"std", number(m.std)}}; }

MeanStd mean_std_from(const json& j) { return {number(j.at("mean")), number(j.at("std"))}; }

json to_json(const EvalReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"q", row.q},
                    {"n_variables", row.n_variables},
                    {"f1", to_json(row.f1)},
                    {"auc", to_json(row.auc)},
                    {"f1_impr_pct", number(row.f1_impr_pct)},
                    {"auc_impr_pct", number(row.auc_impr_pct)},
                    {"f1_folds", numbers(row.f1_folds)},
                    {"auc_folds", numbers(row.auc_folds)},
                    {"failed_folds", row.failed_folds},
                    {"model_detail", row.model_detail}});
  return {{"product", r.product}, {"criterion", to_string(r.criterion)}, {"model", r.model},
          {"seed", r.seed},       {"fold_hash", r.fold_hash},            {"n_rows", r.n_rows},
          {"rows", rows},         {"diagnostics", r.diagnostics}};
}

EvalReport report_from(const json& j) {
  EvalReport r;
  r.product = j.at("product").get<std::string>();
  r.criterion = parse_criterion(j.at("criterion").get<std::string>());
  r.model = j.at("model").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.fold_hash = j.at("fold_hash").get<std::string>();
  r.n_rows = j.at("n_rows").get<std::size_t>();
  r.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
  for (const auto& x : j.at("rows")) {
    SweepRow row;
    row.q = x.at("q").get<double>();
    row.n_variables = x.at("n_variables").get<std::size_t>();
    row.f1 = mean_std_from(x.at("f1"));
    row.auc = mean_std_from(x.at("auc"));
    row.f1_impr_pct = number(x.at("f1_impr_pct"));
    row.auc_impr_pct = number(x.at("auc_impr_pct"));
    row.f1_folds = numbers(x.at("f1_folds"));
    row.auc_folds = numbers(x.at("auc_folds"));
    row.failed_folds = x.at("failed_folds").get<std::size_t>();
    row.model_detail = x.at("model_detail").get<std::string>();
    r.rows.push_back(std::move(row));
  }
  return r;
}

json to_json(const VariableRanking& r) {
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"variable_id", e.variable_id},
                       {"score", number(e.score)},
                       {"frequency", e.frequency},
                       {"co_occurring", e.co_occurring},
                       {"low_support", e.low_support}});
  return {{"product", r.product}, {"criterion", to_string(r.criterion)}, {"entries", entries}, {"excluded", r.excluded}};
}

VariableRanking ranking_from(const json& j) {
  VariableRanking r;
  r.product = j.at("product").get<std::string>();
  r.criterion = parse_criterion(j.at("criterion").get<std::string>());
  r.excluded = j.at("excluded").get<std::vector<std::uint32_t>>();
  for (const auto& x : j.at("entries")) {
    RankedVariable e;
    e.variable_id = x.at("variable_id").get<std::uint32_t>();
    e.score = number(x.at("score"));
    e.frequency = x.at("frequency").get<std::size_t>();
    e.co_occurring = x.at("co_occurring").get<std::size_t>();
    e.low_support = x.at("low_support").get<bool>();
    r.entries.push_back(e);
  }
  return r;
}

}  // namespace

void write_sweep(const SweepArtifact& sweep, const std::filesystem::path& path) {
  json reports = json::array(), rankings = json::array();
  for (const auto& r : sweep.reports) reports.push_back(to_json(r));
  for (const auto& r : sweep.rankings) rankings.push_back(to_json(r));
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw Error("unwritable", "cannot write " + path.string());
  out << json{{"format", "ltc-sweep"}, {"version", 1}, {"reports", reports}, {"rankings", rankings}}.dump(1) << '\n';
}

SweepArtifact read_sweep(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("missing_artifact", "missing artifact: sweep (" + path.string() + ")");
  SweepArtifact s;
  try {
    json j;
    in >> j;
    for (const auto& r : j.at("reports")) s.reports.push_back(report_from(r));
    for (const auto& r : j.at("rankings")) s.rankings.push_back(ranking_from(r));
  } catch (const json::exception& e) {
    throw Error("malformed", "sweep artifact is not valid: " + std::string(e.what()));
  }
  return s;
}

}  // namespace ltc::cli
