#include "ltc/phrasing.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace ltc {

namespace {

constexpr TokenId kPad = std::numeric_limits<TokenId>::max();

struct NGramKey {
  std::array<TokenId, kMaxPhraseLength> ids;

  bool operator==(const NGramKey&) const = default;
  auto operator<=>(const NGramKey&) const = default;
  std::uint8_t length() const {
    std::uint8_t n = 0;
    while (n < kMaxPhraseLength && ids[n] != kPad) ++n;
    return n;
  }
};

struct NGramHash {
  std::size_t operator()(const NGramKey& k) const {
    std::uint64_t h = 0x84222325cbf29ce4ULL;
    for (TokenId t : k.ids) h = mix_seed(h, t);
    return static_cast<std::size_t>(h);
  }
};

// Calls emit(key) for every distinct n-gram of one dialogue's customer turns.
template <typename Emit>
void for_each_distinct_ngram(const TokenizedDialogue& dialogue, std::size_t max_len,
                             const std::vector<bool>* stop, std::vector<NGramKey>& scratch,
                             Emit&& emit) {
  scratch.clear();
  for (const auto& utt : dialogue.customer) {
    const auto& toks = utt.tokens;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      NGramKey key;
      key.ids.fill(kPad);
      bool all_stop = true;
      for (std::size_t n = 1; n <= max_len && i + n <= toks.size(); ++n) {
        key.ids[n - 1] = toks[i + n - 1];
        if (stop) all_stop = all_stop && (*stop)[toks[i + n - 1]];
        if (stop && all_stop) continue;
        scratch.push_back(key);
      }
    }
  }
  std::sort(scratch.begin(), scratch.end());
  scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
  for (const auto& k : scratch) emit(k);
}

NGramKey key_of(const PhraseCandidate& c) {
  NGramKey k;
  k.ids.fill(kPad);
  for (std::size_t i = 0; i < c.length; ++i) k.ids[i] = c.ids[i];
  return k;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string CandidateSet::text(const PhraseCandidate& c) const {
  std::string out;
  for (std::size_t i = 0; i < c.length; ++i) {
    if (i) out.push_back(' ');
    out += vocab->word(c.ids[i]);
  }
  return out;
}

std::vector<std::string> CandidateSet::texts() const {
  std::vector<std::string> out;
  out.reserve(items.size());
  for (const auto& c : items) out.push_back(text(c));
  return out;
}

CandidateSet generate_candidates(const Corpus& corpus, const TokenizedCorpus& tokens,
                                 const CandidateOptions& options) {
  if (options.max_len < 1 || options.max_len > kMaxPhraseLength)
    throw Error("invalid_argument", "max_len must be in [1, 4]");
  if (tokens.dialogues.size() != corpus.dialogues.size())
    throw Error("invalid_argument", "tokenized corpus does not match corpus");

  std::vector<bool> stop;
  if (options.drop_stop_phrases) {
    stop.resize(tokens.vocab->size());
    for (TokenId t = 0; t < tokens.vocab->size(); ++t) stop[t] = is_stopword(tokens.vocab->word(t));
  }

  // Map step per dialogue block, then an associative merge of sorted runs.
  const std::size_t n = tokens.dialogues.size();
  const std::size_t n_blocks = std::max<std::size_t>(1, std::min<std::size_t>(
      std::thread::hardware_concurrency(), (n + 4095) / 4096));
  std::vector<std::vector<std::pair<NGramKey, std::uint32_t>>> partial(n_blocks);
  parallel_for(n_blocks, [&](std::size_t b) {
    std::vector<NGramKey> all, scratch;
    const std::size_t lo = n * b / n_blocks, hi = n * (b + 1) / n_blocks;
    for (std::size_t d = lo; d < hi; ++d)
      for_each_distinct_ngram(tokens.dialogues[d], options.max_len,
                              options.drop_stop_phrases ? &stop : nullptr, scratch,
                              [&](const NGramKey& k) { all.push_back(k); });
    std::sort(all.begin(), all.end());
    auto& out = partial[b];
    for (std::size_t i = 0; i < all.size();) {
      std::size_t j = i;
      while (j < all.size() && all[j] == all[i]) ++j;
      out.emplace_back(all[i], static_cast<std::uint32_t>(j - i));
      i = j;
    }
  });
  while (partial.size() > 1) {
    std::vector<std::pair<NGramKey, std::uint32_t>> merged;
    auto& a = partial[partial.size() - 2];
    auto& b = partial.back();
    merged.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
      if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
        merged.push_back(a[i++]);
      } else if (i == a.size() || b[j].first < a[i].first) {
        merged.push_back(b[j++]);
      } else {
        merged.emplace_back(a[i].first, a[i].second + b[j].second);
        ++i;
        ++j;
      }
    }
    partial.pop_back();
    partial.back() = std::move(merged);
  }

  CandidateSet out;
  out.vocab = tokens.vocab;
  out.products = corpus.product_catalog;
  out.items.reserve(partial.front().size());
  for (const auto& [key, support] : partial.front()) {
    PhraseCandidate c;
    c.ids = key.ids;
    c.length = key.length();
    c.support = support;
    out.items.push_back(std::move(c));
  }
  return out;
}

CandidateSet filter_by_support(const CandidateSet& candidates, std::size_t min_dialogues) {
  CandidateSet out;
  out.vocab = candidates.vocab;
  out.products = candidates.products;
  for (const auto& c : candidates.items)
    if (c.support >= min_dialogues) out.items.push_back(c);
  return out;
}

void count_product_outcomes(CandidateSet& candidates, const Corpus& corpus,
                            const TokenizedCorpus& tokens) {
  std::unordered_map<NGramKey, std::size_t, NGramHash> index;
  index.reserve(candidates.items.size() * 2);
  std::size_t max_len = 1;
  for (std::size_t i = 0; i < candidates.items.size(); ++i) {
    auto& c = candidates.items[i];
    c.per_product.assign(candidates.products.size(), ProductCounts{});
    index.emplace(key_of(c), i);
    max_len = std::max<std::size_t>(max_len, c.length);
  }
  std::unordered_map<ProductId, std::size_t> product_index;
  for (std::size_t p = 0; p < candidates.products.size(); ++p)
    product_index.emplace(candidates.products[p], p);

  std::vector<NGramKey> scratch;
  std::vector<std::pair<std::size_t, int>> offers;
  for (std::size_t d = 0; d < corpus.dialogues.size(); ++d) {
    offers.clear();
    for (const auto& o : corpus.dialogues[d].offers) {
      auto it = product_index.find(o.product_id);
      if (it != product_index.end()) offers.emplace_back(it->second, o.outcome);
    }
    if (offers.empty()) continue;
    for_each_distinct_ngram(tokens.dialogues[d], max_len, nullptr, scratch,
                            [&](const NGramKey& k) {
                              auto it = index.find(k);
                              if (it == index.end()) return;
                              auto& pp = candidates.items[it->second].per_product;
                              for (auto [p, outcome] : offers) {
                                ++pp[p].n_with;
                                pp[p].k_with += static_cast<std::size_t>(outcome);
                              }
                            });
  }
}

std::vector<ProductBaseline> product_baselines(const Corpus& corpus,
                                               const std::vector<ProductId>& products) {
  std::vector<ProductBaseline> out(products.size());
  std::unordered_map<ProductId, std::size_t> index;
  for (std::size_t p = 0; p < products.size(); ++p) index.emplace(products[p], p);
  for (const auto& d : corpus.dialogues)
    for (const auto& o : d.offers) {
      auto it = index.find(o.product_id);
      if (it == index.end()) continue;
      ++out[it->second].n;
      out[it->second].k += static_cast<std::size_t>(o.outcome);
    }
  return out;
}

SignificanceResult significance_test(const CandidateSet& candidates, const PhraseCandidate& phrase,
                                     std::size_t product_index, const ProductBaseline& baseline) {
  if (product_index >= phrase.per_product.size() || phrase.per_product[product_index].n_with == 0)
    throw Error("no_cooccurrence", "no co-occurrence of '" + candidates.text(phrase) +
                                       "' with product " +
                                       (product_index < candidates.products.size()
                                            ? candidates.products[product_index]
                                            : std::string("?")));
  if (baseline.n == 0) throw Error("no_cooccurrence", "product was never offered");
  const auto& pc = phrase.per_product[product_index];
  return two_proportion_z_test(pc.k_with, pc.n_with, baseline.k, baseline.n);
}

SignificanceResult significance_test(const CandidateSet& candidates, const PhraseCandidate& phrase,
                                     const ProductId& product, const Corpus& corpus) {
  auto it = std::find(candidates.products.begin(), candidates.products.end(), product);
  if (it == candidates.products.end())
    throw Error("unknown_product", "product " + product + " not in candidate set");
  const auto p = static_cast<std::size_t>(it - candidates.products.begin());
  return significance_test(candidates, phrase, p, product_baselines(corpus, {product})[0]);
}

CandidateSet select_significant(CandidateSet candidates, const Corpus& corpus,
                                const SignificanceOptions& options,
                                const std::vector<ProductId>& products) {
  std::vector<bool> considered(candidates.products.size(), products.empty());
  for (const auto& p : products) {
    auto it = std::find(candidates.products.begin(), candidates.products.end(), p);
    if (it != candidates.products.end()) considered[it - candidates.products.begin()] = true;
  }
  const auto baselines = product_baselines(corpus, candidates.products);
  std::size_t n_tests = 0;
  for (const auto& c : candidates.items)
    for (std::size_t p = 0; p < c.per_product.size(); ++p)
      if (considered[p] && c.per_product[p].n_with > 0) ++n_tests;
  const double alpha =
      options.bonferroni && n_tests > 0 ? options.alpha / static_cast<double>(n_tests) : options.alpha;

  CandidateSet out;
  out.vocab = candidates.vocab;
  out.products = candidates.products;
  for (auto& c : candidates.items) {
    c.significant_products.clear();
    for (std::size_t p = 0; p < c.per_product.size(); ++p) {
      auto& pc = c.per_product[p];
      if (!considered[p] || pc.n_with == 0 || baselines[p].n == 0) continue;
      auto r = significance_test(candidates, c, p, baselines[p]);
      pc.z_stat = r.z_stat;
      pc.p_value = r.p_value;
      pc.tested = true;
      if (r.p_value < alpha) c.significant_products.push_back(p);
    }
    if (!c.significant_products.empty()) out.items.push_back(std::move(c));
  }
  return out;
}

void write_candidate_table(const CandidateSet& candidates, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw Error("unwritable", "cannot write " + path.string());
  out << "phrase\tsupport";
  for (const auto& p : candidates.products) out << '\t' << p << "_n\t" << p << "_k\t" << p << "_z\t" << p << "_p";
  out << "\tsignificant_products\n";
  for (const auto& c : candidates.items) {
    out << candidates.text(c) << '\t' << c.support;
    for (std::size_t p = 0; p < candidates.products.size(); ++p) {
      ProductCounts pc = p < c.per_product.size() ? c.per_product[p] : ProductCounts{};
      out << '\t' << pc.n_with << '\t' << pc.k_with << '\t' << format_double(pc.z_stat) << '\t'
          << format_double(pc.p_value);
    }
    out << '\t';
    for (std::size_t i = 0; i < c.significant_products.size(); ++i)
      out << (i ? "," : "") << candidates.products[c.significant_products[i]];
    out << '\n';
  }
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

CandidateTable read_candidate_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("unreadable", "cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error("malformed", "empty candidate table");
  auto header = split(line, '\t');
  if (header.size() < 3 || (header.size() - 3) % 4 != 0)
    throw Error("malformed", "bad candidate table header");
  CandidateTable t;
  for (std::size_t i = 2; i + 1 < header.size(); i += 4)
    t.products.push_back(header[i].substr(0, header[i].size() - 2));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cols = split(line, '\t');
    if (cols.size() != header.size()) throw Error("malformed", "bad candidate row: " + line);
    CandidateRow r;
    r.phrase = cols[0];
    r.support = std::stoull(cols[1]);
    for (std::size_t p = 0; p < t.products.size(); ++p) {
      ProductCounts pc;
      pc.n_with = std::stoull(cols[2 + 4 * p]);
      pc.k_with = std::stoull(cols[3 + 4 * p]);
      pc.z_stat = std::stod(cols[4 + 4 * p]);
      pc.p_value = std::stod(cols[5 + 4 * p]);
      r.per_product.push_back(pc);
    }
    if (!cols.back().empty()) r.significant_products = split(cols.back(), ',');
    t.rows.push_back(std::move(r));
  }
  return t;
}

}  // namespace ltc
