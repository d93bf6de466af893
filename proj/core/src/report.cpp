#include "ltc/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace ltc {

namespace {

std::string num(double v, const char* f = "%.17g") {
  if (std::isnan(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double parse_num(const std::string& s) {
  if (s == "NA") return std::numeric_limits<double>::quiet_NaN();
  return std::stod(s);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw Error("unwritable", "cannot write " + path.string());
  out << content;
  if (!out) throw Error("unwritable", "failed writing " + path.string());
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

double improvement_pct(double base, double value) { return (value - base) / base * 100.0; }

std::string format_pct_3sig(double pct) {
  if (std::isnan(pct)) return "NA";
  const double a = std::fabs(pct);
  int decimals = 2;
  if (a > 0) {
    const double rounded = std::stod(num(a, "%.2e"));
    decimals = std::max(0, 2 - static_cast<int>(std::floor(std::log10(rounded))));
  }
  return (pct < 0 ? "-" : "+") + fixed(a, decimals) + "%";
}

std::string format_improvement(double base, double value) { return format_pct_3sig(improvement_pct(base, value)); }

std::vector<ReportTableRow> report_rows(const std::vector<EvalReport>& reports) {
  std::vector<ReportTableRow> out;
  for (const auto& r : reports)
    for (const auto& row : r.rows)
      out.push_back({r.product, to_string(r.criterion), r.model, row.q, row.f1.mean, row.f1.std, row.auc.mean,
                     row.auc.std, row.f1_impr_pct, row.auc_impr_pct, r.seed, r.fold_hash});
  return out;
}

void write_report_table(const std::vector<EvalReport>& reports, const std::filesystem::path& path) {
  std::ostringstream s;
  s << "product\tcriterion\tmodel\tq\tf1_mean\tf1_std\tauc_mean\tauc_std\tf1_impr_pct\tauc_impr_pct\tseed\tfold_hash\n";
  for (const auto& r : report_rows(reports))
    s << r.product << '\t' << r.criterion << '\t' << r.model << '\t' << num(r.q, "%g") << '\t' << num(r.f1_mean)
      << '\t' << num(r.f1_std) << '\t' << num(r.auc_mean) << '\t' << num(r.auc_std) << '\t' << num(r.f1_impr_pct)
      << '\t' << num(r.auc_impr_pct) << '\t' << r.seed << '\t' << r.fold_hash << '\n';
  write_file(path, s.str());
}

std::vector<ReportTableRow> read_report_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("missing_artifact", "missing artifact: report (" + path.string() + ")");
  std::string line;
  std::getline(in, line);
  std::vector<ReportTableRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> c;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, '\t')) c.push_back(cell);
    if (c.size() != 12) throw Error("malformed", "bad report row: " + line);
    rows.push_back({c[0], c[1], c[2], parse_num(c[3]), parse_num(c[4]), parse_num(c[5]), parse_num(c[6]),
                    parse_num(c[7]), parse_num(c[8]), parse_num(c[9]), std::stoull(c[10]), c[11]});
  }
  return rows;
}

std::string improvement_table(const std::vector<EvalReport>& reports) {
  std::ostringstream s;
  for (const auto& r : reports) {
    s << "product\tcriterion\tmodel\tmeasure";
    for (const auto& row : r.rows) s << '\t' << (row.q == 0 ? std::string("no_context") : num(row.q, "%g") + "%");
    s << '\n';
    for (int m = 0; m < 2; ++m) {
      s << r.product << '\t' << to_string(r.criterion) << '\t' << r.model << '\t' << (m ? "AUC" : "F1");
      for (const auto& row : r.rows) {
        const double v = m ? row.auc.mean : row.f1.mean;
        const double impr = m ? row.auc_impr_pct : row.f1_impr_pct;
        s << '\t' << (std::isnan(v) ? std::string("NA") : fixed(v, 3));
        if (row.q != 0) s << " (" << format_pct_3sig(impr) << ")";
      }
      s << '\n';
    }
  }
  return s.str();
}

std::string long_tail_svg(const VariableRanking& ranking) {
  const double W = 720, H = 360, left = 60, right = 20, top = 30, bottom = 50;
  const double pw = W - left - right, ph = H - top - bottom;
  double max_score = 0;
  for (const auto& e : ranking.entries) max_score = std::max(max_score, e.score);
  if (max_score <= 0) max_score = 1;
  const std::size_t n = ranking.entries.size();
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
    << escape_xml(ranking.product) << ": contextual variables by purchase propensity " << to_string(ranking.criterion)
    << "</text>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
    << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = max_score * t / 4.0, y = top + ph - ph * t / 4.0;
    s << "<text x=\"" << left - 6 << "\" y=\"" << fixed(y + 4, 2)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
      << (ranking.criterion == RankCriterion::kFrequency ? fixed(v, 0) : fixed(v, 2)) << "</text>\n";
  }
  const double bw = n ? pw / static_cast<double>(n) : pw;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = ph * ranking.entries[i].score / max_score;
    s << "<rect class=\"bar\" x=\"" << fixed(left + bw * static_cast<double>(i), 3) << "\" y=\""
      << fixed(top + ph - h, 3) << "\" width=\"" << fixed(std::max(bw * 0.9, 0.5), 3) << "\" height=\"" << fixed(h, 3)
      << "\" fill=\"#4c72b0\"><title>variable " << ranking.entries[i].variable_id << ": "
      << num(ranking.entries[i].score, "%g") << "</title></rect>\n";
  }
  s << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 12
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">variables, sorted</text>\n";
  s << "</svg>\n";
  return s.str();
}

std::string metric_curves_svg(const std::vector<EvalReport>& reports, Metric metric) {
  const double W = 720, H = 420, left = 60, right = 180, top = 30, bottom = 50;
  const double pw = W - left - right, ph = H - top - bottom;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& r : reports)
    for (const auto& row : r.rows) {
      const double v = metric == Metric::kF1 ? row.f1.mean : row.auc.mean;
      if (std::isnan(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!std::isfinite(lo)) lo = 0, hi = 1;
  if (hi - lo < 1e-6) lo -= 0.01, hi += 0.01;
  const double pad = (hi - lo) * 0.05;
  lo -= pad;
  hi += pad;
  auto xs = [&](double q) { return left + pw * q / 100.0; };
  auto ys = [&](double v) { return top + ph - ph * (v - lo) / (hi - lo); };
  const char* name = metric == Metric::kF1 ? "F1" : "ROC AUC";
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << left + pw / 2 << "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
    << name << " vs percent of context used</text>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
    << "\" stroke=\"black\"/>\n";
  for (int q = 0; q <= 100; q += 10)
    s << "<text x=\"" << fixed(xs(q), 2) << "\" y=\"" << top + ph + 16
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << q << "%</text>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    s << "<text x=\"" << left - 6 << "\" y=\"" << fixed(ys(v) + 4, 2)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << fixed(v, 3) << "</text>\n";
  }
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const auto& r = reports[k];
    const char* color = kPalette[k % (sizeof kPalette / sizeof *kPalette)];
    const std::string series = escape_xml(r.product + " " + r.model + " " + to_string(r.criterion));
    std::ostringstream pts;
    for (const auto& row : r.rows) {
      const double v = metric == Metric::kF1 ? row.f1.mean : row.auc.mean;
      if (std::isnan(v)) continue;
      pts << fixed(xs(row.q), 2) << ',' << fixed(ys(v), 2) << ' ';
    }
    s << "<polyline class=\"curve\" data-series=\"" << series << "\" fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"2\" points=\"" << pts.str() << "\"/>\n";
    for (const auto& row : r.rows) {
      const double v = metric == Metric::kF1 ? row.f1.mean : row.auc.mean;
      if (std::isnan(v)) continue;
      s << "<circle class=\"marker\" data-series=\"" << series << "\" cx=\"" << fixed(xs(row.q), 2) << "\" cy=\""
        << fixed(ys(v), 2) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = top + 14.0 * static_cast<double>(k);
    s << "<rect x=\"" << left + pw + 12 << "\" y=\"" << ly << "\" width=\"10\" height=\"10\" fill=\"" << color
      << "\"/>\n";
    s << "<text x=\"" << left + pw + 26 << "\" y=\"" << ly + 9 << "\" font-family=\"sans-serif\" font-size=\"10\">"
      << series << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

ExportedFiles export_report(const std::vector<EvalReport>& reports, const std::vector<VariableRanking>& long_tails,
                            const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir))
    throw Error("unwritable", "cannot create output directory " + out_dir.string());
  ExportedFiles out;
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file(out_dir / name, content);
    out.files.push_back(out_dir / name);
  };
  write_report_table(reports, out_dir / "report.tsv");
  out.files.push_back(out_dir / "report.tsv");
  emit("improvements.tsv", improvement_table(reports));
  std::map<std::string, std::vector<EvalReport>> by_group;
  for (const auto& r : reports) by_group[r.product + "_" + to_string(r.criterion)].push_back(r);
  for (const auto& [group, rs] : by_group) {
    emit("curve_f1_" + group + ".svg", metric_curves_svg(rs, Metric::kF1));
    emit("curve_auc_" + group + ".svg", metric_curves_svg(rs, Metric::kAuc));
  }
  for (const auto& lt : long_tails) emit("long_tail_" + lt.product + "_" + to_string(lt.criterion) + ".svg", long_tail_svg(lt));
  return out;
}

}  // namespace ltc
