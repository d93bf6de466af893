#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "ltc/phrasing.hpp"
#include "ltc/significance.hpp"
#include "ltc/text.hpp"

namespace {

ltc::Corpus random_corpus(std::uint64_t seed, std::size_t n) {
  const std::vector<std::string> words{"card", "loan", "the", "a", "salary", "business", "need", "account", "of", "fast"};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> w(0, words.size() - 1), len(1, 7), lines(2, 4);
  std::bernoulli_distribution coin(0.4);
  ltc::Corpus c;
  c.product_catalog = {"p", "q"};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> ls;
    for (std::size_t l = lines(rng); l > 0; --l) {
      std::string s;
      for (std::size_t k = len(rng); k > 0; --k) s += (s.empty() ? "" : " ") + words[w(rng)];
      ls.push_back(s);
    }
    std::vector<std::pair<std::string, int>> offers{{"p", coin(rng) ? 1 : 0}};
    if (coin(rng)) offers.emplace_back("q", coin(rng) ? 1 : 0);
    c.dialogues.push_back(fixture::dialogue(std::to_string(i), ls, offers));
  }
  return c;
}

// phrase -> set of dialogue indices, counted from the raw text.
std::map<std::string, std::set<std::size_t>> brute_ngrams(const ltc::Corpus& c, std::size_t max_len, bool drop_stop) {
  std::map<std::string, std::set<std::size_t>> out;
  for (std::size_t d = 0; d < c.dialogues.size(); ++d)
    for (const auto& u : c.dialogues[d].utterances) {
      if (u.speaker != ltc::Speaker::kCustomer) continue;
      auto w = ltc::tokenize_words(u.text);
      for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t n = 1; n <= max_len && i + n <= w.size(); ++n) {
          bool all_stop = true;
          std::string p;
          for (std::size_t k = i; k < i + n; ++k) {
            all_stop = all_stop && ltc::is_stopword(w[k]);
            p += (k == i ? "" : " ") + w[k];
          }
          if (drop_stop && all_stop) continue;
          out[p].insert(d);
        }
    }
  return out;
}

TEST(Candidates, SupportMatchesBruteForceCount) {
  for (std::uint64_t seed : {1, 2, 3}) {
    auto c = random_corpus(seed, 300);
    auto toks = ltc::tokenize_corpus(c);
    auto cands = ltc::generate_candidates(c, toks);
    auto want = brute_ngrams(c, 4, true);
    ASSERT_EQ(cands.size(), want.size());
    for (const auto& item : cands.items) {
      auto it = want.find(cands.text(item));
      ASSERT_NE(it, want.end()) << cands.text(item);
      EXPECT_EQ(item.support, it->second.size());
    }
  }
}

TEST(Candidates, KeepsStopPhrasesWhenAsked) {
  auto c = random_corpus(4, 100);
  auto toks = ltc::tokenize_corpus(c);
  ltc::CandidateOptions opt;
  opt.drop_stop_phrases = false;
  opt.max_len = 2;
  auto cands = ltc::generate_candidates(c, toks, opt);
  EXPECT_EQ(cands.size(), brute_ngrams(c, 2, false).size());
  opt.max_len = 5;
  EXPECT_THROW(ltc::generate_candidates(c, toks, opt), ltc::Error);
}

TEST(Candidates, SupportFilterIsMonotone) {
  auto c = random_corpus(5, 300);
  auto toks = ltc::tokenize_corpus(c);
  auto cands = ltc::generate_candidates(c, toks);
  std::size_t prev = cands.size();
  for (std::size_t m : {1, 5, 20, 50, 100}) {
    auto f = ltc::filter_by_support(cands, m);
    EXPECT_LE(f.size(), prev);
    for (const auto& item : f.items) EXPECT_GE(item.support, m);
    prev = f.size();
  }
}

TEST(Significance, PooledZTestMatchesFormula) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> nd(5, 400);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n1 = nd(rng), n2 = nd(rng);
    const std::size_t k1 = std::uniform_int_distribution<std::size_t>(0, n1)(rng);
    const std::size_t k2 = std::uniform_int_distribution<std::size_t>(0, n2)(rng);
    const double p = static_cast<double>(k1 + k2) / static_cast<double>(n1 + n2);
    auto r = ltc::two_proportion_z_test(k1, n1, k2, n2);
    if (p == 0.0 || p == 1.0) {
      EXPECT_EQ(r.p_value, 1.0);
      continue;
    }
    const double z = (static_cast<double>(k1) / n1 - static_cast<double>(k2) / n2) /
                     std::sqrt(p * (1 - p) * (1.0 / n1 + 1.0 / n2));
    EXPECT_NEAR(r.z_stat, z, 1e-12);
    EXPECT_NEAR(r.p_value, std::erfc(std::abs(z) / std::sqrt(2.0)), 1e-12);
  }
}

TEST(Significance, ProductCountsAndSelection) {
  auto c = random_corpus(6, 400);
  auto toks = ltc::tokenize_corpus(c);
  auto cands = ltc::filter_by_support(ltc::generate_candidates(c, toks), 30);
  ltc::count_product_outcomes(cands, c, toks);
  auto sets = brute_ngrams(c, 4, true);
  std::size_t np = 0, kp = 0;
  for (const auto& d : c.dialogues)
    if (auto o = d.outcome_for("p")) {
      ++np;
      kp += static_cast<std::size_t>(*o);
    }
  std::set<std::string> want_sig;
  for (const auto& item : cands.items) {
    std::size_t n = 0, k = 0;
    for (auto d : sets.at(cands.text(item)))
      if (auto o = c.dialogues[d].outcome_for("p")) {
        ++n;
        k += static_cast<std::size_t>(*o);
      }
    EXPECT_EQ(item.per_product[0].n_with, n);
    EXPECT_EQ(item.per_product[0].k_with, k);
    if (n > 0 && ltc::two_proportion_z_test(k, n, kp, np).p_value < 0.2) want_sig.insert(cands.text(item));
  }
  ltc::SignificanceOptions opt;
  opt.alpha = 0.2;
  auto sig = ltc::select_significant(cands, c, opt, {"p"});
  std::set<std::string> got;
  for (const auto& item : sig.items) got.insert(sig.text(item));
  EXPECT_EQ(got, want_sig);

  opt.bonferroni = true;
  auto strict = ltc::select_significant(cands, c, opt, {"p"});
  EXPECT_LE(strict.size(), sig.size());
}

TEST(Significance, CandidateTableRoundTrip) {
  auto c = random_corpus(8, 300);
  auto toks = ltc::tokenize_corpus(c);
  auto cands = ltc::filter_by_support(ltc::generate_candidates(c, toks), 40);
  ltc::count_product_outcomes(cands, c, toks);
  ltc::SignificanceOptions opt;
  opt.alpha = 0.5;
  auto sig = ltc::select_significant(cands, c, opt);
  fixture::TempDir dir("cand");
  ltc::write_candidate_table(sig, dir / "c.tsv");
  auto back = ltc::read_candidate_table(dir / "c.tsv");
  EXPECT_EQ(back.products, sig.products);
  ASSERT_EQ(back.rows.size(), sig.size());
  for (std::size_t i = 0; i < back.rows.size(); ++i) {
    EXPECT_EQ(back.rows[i].phrase, sig.text(sig.items[i]));
    EXPECT_EQ(back.rows[i].support, sig.items[i].support);
    EXPECT_EQ(back.rows[i].per_product[0].k_with, sig.items[i].per_product[0].k_with);
  }
}

}  // namespace
