#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sys/wait.h>

#include "fixtures.hpp"
#include "ltc/report.hpp"

namespace {

struct Outcome {
  int status = -1;
  std::string output;
};

Outcome ltc_run(const std::string& args) {
  const std::string cmd = std::string(LTC_BINARY) + " " + args + " 2>&1";
  Outcome o;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return o;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) o.output.append(buf, n);
  const int raw = pclose(p);
  o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return o;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

const char* kSmallConfig =
    "[synth]\nn_dialogues = 3000\nn_planted_variables = 30\n\n"
    "[phrasing]\nmin_support = 20\n\n"
    "[models]\nmodel = logreg\n\n"
    "[evaluation]\nq_list = 0,50,100\nfolds = 3\ncriteria = frequency\n";

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    write_file(dir_ / "run.ini", kSmallConfig);
    base_ = "--config " + (dir_ / "run.ini").string() + " --store " + (dir_ / "store").string();
  }
  fixture::TempDir dir_{"cli"};
  std::string base_;
};

TEST_F(Cli, MissingUpstreamArtifactIsReported) {
  auto o = ltc_run("train " + base_);
  EXPECT_EQ(o.status, 1);
  EXPECT_NE(o.output.find("error[missing_artifact]: missing artifact: annotations"), std::string::npos) << o.output;
}

TEST_F(Cli, FullRunThenRerunSkipsEveryStage) {
  auto first = ltc_run("report --auto " + base_);
  ASSERT_EQ(first.status, 0) << first.output;
  EXPECT_NE(first.output.find("stage synth: done"), std::string::npos);
  auto rows = ltc::read_report_table(dir_ / "store" / "report" / "report.tsv");
  EXPECT_EQ(rows.size(), 12u);  // 4 products x 3 quantiles
  auto second = ltc_run("report --auto " + base_);
  ASSERT_EQ(second.status, 0) << second.output;
  EXPECT_EQ(second.output.find("done in"), std::string::npos) << second.output;
  EXPECT_NE(second.output.find("stage sweep: up to date"), std::string::npos);
  auto verify = ltc_run("verify " + base_);
  EXPECT_EQ(verify.status, 0) << verify.output;
}

TEST_F(Cli, ChangedRegistryIsDetectedDownstream) {
  ASSERT_EQ(ltc_run("annotate --auto " + base_).status, 0);
  write_file(dir_ / "run.ini", std::string(kSmallConfig) + "\n[registry]\nnegated_clusters = none\n");
  ASSERT_EQ(ltc_run("registry " + base_).status, 0);
  auto o = ltc_run("train " + base_);
  EXPECT_EQ(o.status, 1);
  EXPECT_NE(o.output.find("error[registry_skew]"), std::string::npos) << o.output;
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(ltc_run("sweep --criterion sideways " + base_).status, 2);
  write_file(dir_ / "bad.ini", "[synth]\nno_such_key = 1\n");
  EXPECT_EQ(ltc_run("synth --config " + (dir_ / "bad.ini").string()).status, 2);
  EXPECT_NE(ltc_run("--version").output.find('.'), std::string::npos);
}

}  // namespace
