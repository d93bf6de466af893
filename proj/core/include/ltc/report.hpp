#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ltc/evaluation.hpp"
#include "ltc/sweep.hpp"

namespace ltc {

// (value - base) / base * 100
double improvement_pct(double base, double value);

// Signed percentage with three significant figures, e.g. "+4.11%", "+33.5%".
std::string format_pct_3sig(double pct);
std::string format_improvement(double base, double value);

// Tab-separated: product, criterion, model, q, f1_mean, f1_std, auc_mean,
// auc_std, f1_impr_pct, auc_impr_pct, seed, fold_hash. Gaps print as NA.
void write_report_table(const std::vector<EvalReport>& reports, const std::filesystem::path& path);

struct ReportTableRow {
  ProductId product;
  std::string criterion;
  std::string model;
  double q = 0.0;
  double f1_mean = 0.0, f1_std = 0.0, auc_mean = 0.0, auc_std = 0.0;
  double f1_impr_pct = 0.0, auc_impr_pct = 0.0;
  std::uint64_t seed = 0;
  std::string fold_hash;
};

std::vector<ReportTableRow> read_report_table(const std::filesystem::path& path);
std::vector<ReportTableRow> report_rows(const std::vector<EvalReport>& reports);

// Product x measure rows, one column per q: "0.634 (+11.1%)".
std::string improvement_table(const std::vector<EvalReport>& reports);

// Bar chart of the frequency-sorted variable scores.
std::string long_tail_svg(const VariableRanking& ranking);

enum class Metric { kF1, kAuc };

// One polyline with a marker per q for every report.
std::string metric_curves_svg(const std::vector<EvalReport>& reports, Metric metric);

struct ExportedFiles {
  std::vector<std::filesystem::path> files;
};

ExportedFiles export_report(const std::vector<EvalReport>& reports, const std::vector<VariableRanking>& long_tails,
                            const std::filesystem::path& out_dir);

}  // namespace ltc
