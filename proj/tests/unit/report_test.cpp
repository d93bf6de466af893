#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "ltc/report.hpp"
#include "reference_table.hpp"

namespace {

TEST(Format, ThreeSignificantFigures) {
  EXPECT_EQ(ltc::format_pct_3sig(4.1139), "+4.11%");
  EXPECT_EQ(ltc::format_pct_3sig(33.5), "+33.5%");
  EXPECT_EQ(ltc::format_pct_3sig(0.6975), "+0.698%");
  EXPECT_EQ(ltc::format_pct_3sig(13.0), "+13.0%");
  EXPECT_EQ(ltc::format_pct_3sig(-2.104), "-2.10%");
  EXPECT_EQ(ltc::format_pct_3sig(9.996), "+10.0%");
  EXPECT_EQ(ltc::format_pct_3sig(123.4), "+123%");
  EXPECT_EQ(ltc::format_pct_3sig(0.0), "+0.00%");
  EXPECT_EQ(ltc::format_pct_3sig(std::nan("")), "NA");
}

TEST(Format, ImprovementFormula) {
  EXPECT_DOUBLE_EQ(ltc::improvement_pct(0.5, 0.6), 20.0 * (0.6 - 0.5) / 0.1);
  EXPECT_EQ(ltc::format_improvement(0.535, 0.557), "+4.11%");
}

TEST(Format, PublishedImprovementsAreConsistentWithTheirValues) {
  for (const auto& row : reference::improvements())
    for (const auto& c : row.cells)
      EXPECT_NEAR(ltc::improvement_pct(row.base, c.value), c.printed_pct, 0.15) << row.product << ' ' << row.measure;
}

ltc::EvalReport sample_report() {
  ltc::EvalReport r;
  r.product = "salary";
  r.criterion = ltc::RankCriterion::kRate;
  r.model = "gbdt";
  r.seed = 42;
  r.fold_hash = "abc";
  const double f1[] = {0.65, 0.662, 0.744};
  const double auc[] = {0.711, 0.744, 0.853};
  const double q[] = {0, 10, 100};
  for (int i = 0; i < 3; ++i) {
    ltc::SweepRow row;
    row.q = q[i];
    row.f1 = {f1[i], 0.01};
    row.auc = {auc[i], 0.02};
    row.f1_impr_pct = ltc::improvement_pct(f1[0], f1[i]);
    row.auc_impr_pct = ltc::improvement_pct(auc[0], auc[i]);
    r.rows.push_back(row);
  }
  return r;
}

TEST(Report, ImprovementTableLayout) {
  auto text = ltc::improvement_table({sample_report()});
  std::istringstream in(text);
  std::string header, f1, auc;
  std::getline(in, header);
  std::getline(in, f1);
  std::getline(in, auc);
  EXPECT_EQ(header, "product\tcriterion\tmodel\tmeasure\tno_context\t10%\t100%");
  EXPECT_EQ(f1, "salary\trate\tgbdt\tF1\t0.650\t0.662 (+1.85%)\t0.744 (+14.5%)");
  EXPECT_EQ(auc, "salary\trate\tgbdt\tAUC\t0.711\t0.744 (+4.64%)\t0.853 (+20.0%)");
}

TEST(Report, TableRoundTrip) {
  fixture::TempDir dir("rep");
  auto r = sample_report();
  ltc::write_report_table({r}, dir / "t.tsv");
  auto rows = ltc::read_report_table(dir / "t.tsv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[2].product, "salary");
  EXPECT_EQ(rows[2].criterion, "rate");
  EXPECT_DOUBLE_EQ(rows[2].q, 100.0);
  EXPECT_NEAR(rows[2].auc_mean, 0.853, 1e-12);
  EXPECT_NEAR(rows[1].f1_impr_pct, r.rows[1].f1_impr_pct, 1e-9);
  EXPECT_EQ(rows[0].fold_hash, "abc");
}

TEST(Report, ExportWritesTablesAndCharts) {
  fixture::TempDir dir("export");
  ltc::VariableRanking tail;
  tail.product = "salary";
  for (std::uint32_t v = 0; v < 20; ++v) tail.entries.push_back({v, 100.0 / (v + 1), 0, 0, false});
  auto files = ltc::export_report({sample_report()}, {tail}, dir.path());
  EXPECT_GE(files.files.size(), 4u);
  for (const auto& f : files.files) {
    ASSERT_TRUE(std::filesystem::exists(f)) << f;
    if (f.extension() == ".svg") {
      std::ifstream in(f);
      std::string all((std::istreambuf_iterator<char>(in)), {});
      EXPECT_EQ(all.rfind("<svg", 0), 0u);
      EXPECT_NE(all.find("</svg>"), std::string::npos);
    }
  }
  auto svg = ltc::long_tail_svg(tail);
  std::size_t bars = 0;
  for (auto p = svg.find("<rect"); p != std::string::npos; p = svg.find("<rect", p + 1)) ++bars;
  EXPECT_EQ(bars, 21u);
}

}  // namespace
