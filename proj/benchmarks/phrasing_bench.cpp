#include <benchmark/benchmark.h>

#include "ltc/phrasing.hpp"
#include "ltc/synthgen.hpp"

namespace {

void BM_CandidatesAndSignificance(benchmark::State& state) {
  ltc::SynthConfig cfg;
  cfg.n_dialogues = static_cast<std::size_t>(state.range(0));
  cfg.n_planted_variables = 50;
  const auto out = ltc::generate(cfg);
  const auto tokens = ltc::tokenize_corpus(out.corpus);
  for (auto _ : state) {
    auto cands = ltc::filter_by_support(ltc::generate_candidates(out.corpus, tokens), 20);
    ltc::count_product_outcomes(cands, out.corpus, tokens);
    benchmark::DoNotOptimize(ltc::select_significant(std::move(cands), out.corpus));
  }
}
BENCHMARK(BM_CandidatesAndSignificance)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
