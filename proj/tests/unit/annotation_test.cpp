#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "ltc/annotation.hpp"

namespace {

ltc::Registry registry_with_twin() {
  ltc::NegationConfig neg;
  neg.negated_clusters = {0};
  return ltc::build_registry({{0, {"business loan", "loan"}, {}}, {1, {"salary card"}, {}}}, neg);
}

std::vector<std::uint32_t> active(const ltc::Registry& r, std::vector<std::string> lines) {
  return ltc::Annotator(r).active_variables(fixture::dialogue("d", std::move(lines), {}));
}

TEST(Annotate, PositiveAndNegatedTwin) {
  auto r = registry_with_twin();  // 0 loan+, 1 loan-, 2 salary card
  EXPECT_EQ(active(r, {"I want a business loan", "ok"}), (std::vector<std::uint32_t>{0}));
  EXPECT_EQ(active(r, {"I never wanted a loan", "ok"}), (std::vector<std::uint32_t>{1}));
  EXPECT_EQ(active(r, {"I don't need a loan", "salary card please"}), (std::vector<std::uint32_t>{1, 2}));
  EXPECT_EQ(active(r, {"no, I think a loan", "but not a loan"}), (std::vector<std::uint32_t>{0, 1}));
}

TEST(Annotate, CueOutsideWindowDoesNotNegate) {
  auto r = registry_with_twin();
  EXPECT_EQ(active(r, {"no I really do want a loan", "ok"}), (std::vector<std::uint32_t>{0}));
}

TEST(Annotate, NegationWithoutTwinSetsNothing) {
  auto r = registry_with_twin();
  EXPECT_TRUE(active(r, {"not a salary card", "fine"}).empty());
}

TEST(Annotate, ManagerTurnsAreIgnored) {
  auto r = registry_with_twin();
  auto d = fixture::dialogue("d", {"hello", "fine"}, {});
  d.utterances.push_back({ltc::Speaker::kManager, "what about a loan", d.utterances.size()});
  EXPECT_TRUE(ltc::Annotator(r).active_variables(d).empty());
}

TEST(Annotate, PhraseMustMatchWholeTokens) {
  auto r = registry_with_twin();
  EXPECT_TRUE(active(r, {"loans and salary cards", "x"}).empty());
}

TEST(Annotate, CorpusAnnotationsFileRoundTripAndCoverage) {
  auto r = registry_with_twin();
  ltc::Corpus c;
  c.product_catalog = {"a", "b"};
  c.dialogues.push_back(fixture::dialogue("1", {"a business loan", "x"}, {{"a", 1}}));
  c.dialogues.push_back(fixture::dialogue("2", {"nothing here", "x"}, {{"a", 0}, {"b", 1}}));
  auto a = ltc::annotate_corpus(c, r);
  EXPECT_EQ(a.registry_hash, r.hash());
  EXPECT_EQ(a.n_variables, 3u);
  EXPECT_EQ(a.dense(0).values, (std::vector<std::uint8_t>{1, 0, 0}));
  fixture::TempDir dir("ann");
  ltc::write_annotations(a, dir / "a.tsv");
  auto back = ltc::read_annotations(dir / "a.tsv");
  EXPECT_EQ(back.registry_hash, a.registry_hash);
  EXPECT_EQ(back.active, a.active);
  EXPECT_EQ(back.dialogue_ids, a.dialogue_ids);
  auto cov = ltc::context_coverage(c, a);
  ASSERT_EQ(cov.size(), 2u);
  EXPECT_DOUBLE_EQ(cov[0].second, 0.5);
  EXPECT_DOUBLE_EQ(cov[1].second, 0.0);
}

}  // namespace
