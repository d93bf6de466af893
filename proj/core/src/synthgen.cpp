#include "ltc/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <unordered_map>

#include "json.hpp"
#include "ltc/models.hpp"
#include "ltc/text.hpp"

namespace ltc {

namespace {

constexpr std::size_t kBlock = 1024;

enum Stream : std::uint64_t {
  kVocabStream = 1,
  kEffectStream,
  kTraitStream,
  kLoadingStream,
  kStructureStream,
  kOutcomeStream,
};

std::uint64_t stream_seed(std::uint64_t seed, Stream s, std::uint64_t index = 0) {
  return mix_seed(mix_seed(seed, s), index);
}

const std::vector<std::string>& filler_function_words() {
  static const std::vector<std::string> kWords = {"i",  "we",   "the",  "a",   "to",   "and", "it",   "that",
                                                  "for", "our", "is",   "are", "with", "this", "so",  "but",
                                                  "have", "just", "my", "of",  "in",   "on",   "at",  "you"};
  return kWords;
}

class WordFactory {
 public:
  explicit WordFactory(std::uint64_t seed) : rng_(seed) {
    for (const auto& w : filler_function_words()) used_.insert(w);
    for (const char* w : {"not", "no", "never"}) used_.insert(w);
  }

  std::string next() {
    static const std::string kConsonants = "bdfgklmnprstvz";
    static const std::string kVowels = "aeiou";
    std::uniform_int_distribution<std::size_t> c(0, kConsonants.size() - 1), v(0, kVowels.size() - 1);
    std::uniform_int_distribution<int> syllables(2, 3);
    while (true) {
      std::string w;
      const int n = syllables(rng_);
      for (int s = 0; s < n; ++s) {
        w += kConsonants[c(rng_)];
        w += kVowels[v(rng_)];
      }
      if (used_.insert(w).second && !is_stopword(w)) return w;
    }
  }

 private:
  std::mt19937_64 rng_;
  std::set<std::string> used_;
};

struct Structure {
  std::size_t customer = 0;
  std::string customer_id;
  std::size_t product = 0;
  std::vector<std::uint32_t> active;
  std::vector<std::uint32_t> negated;
  std::vector<std::string> customer_lines;
  std::string timestamp;
};

void validate(const SynthConfig& c) {
  if (!c.seed) throw Error("invalid_config", "synthetic generation requires an explicit seed");
  if (c.n_dialogues == 0) throw Error("invalid_config", "n_dialogues must be positive");
  if (c.products.empty()) throw Error("invalid_config", "at least one product is required");
  for (const auto& p : c.products) {
    if (!(p.base_rate > 0.0 && p.base_rate < 1.0))
      throw Error("invalid_config", "base rate of " + p.id + " must lie in (0, 1)");
    if (!(p.offer_share > 0.0)) throw Error("invalid_config", "offer share of " + p.id + " must be positive");
  }
  if (c.n_planted_variables == 0) throw Error("invalid_config", "n_planted_variables must be at least 1");
  if (!(c.zipf_exponent >= 0.0)) throw Error("invalid_config", "zipf_exponent must be non-negative");
  if (!(c.max_activation > 0.0 && c.max_activation <= 1.0))
    throw Error("infeasible_config", "activation probability of the top variable must lie in (0, 1]");
  if (!(c.negation_rate >= 0.0 && c.negation_rate <= 1.0))
    throw Error("invalid_config", "negation_rate must lie in [0, 1]");
  if (c.min_customer_lines < 1 || c.max_customer_lines < c.min_customer_lines)
    throw Error("invalid_config", "customer line bounds are inconsistent");
  if (c.embed_dim == 0) throw Error("invalid_config", "embed_dim must be positive");
  if (c.n_filler_words < 10) throw Error("invalid_config", "n_filler_words must be at least 10");
  if (!c.effects.empty()) {
    if (c.effects.size() != c.n_planted_variables) throw Error("invalid_config", "effects must list every variable");
    for (const auto& e : c.effects)
      if (e.size() != c.products.size()) throw Error("invalid_config", "effects must list every product");
  }
  if (!c.templates.empty()) {
    if (c.templates.size() != c.n_planted_variables)
      throw Error("invalid_config", "templates must list every variable");
    for (const auto& t : c.templates)
      if (t.empty()) throw Error("invalid_config", "every variable needs at least one template");
  }
}

std::string join(const std::vector<std::string>& words) { return join_words(words, " "); }

}  // namespace

SynthOutput generate(const SynthConfig& config) {
  validate(config);
  const std::uint64_t seed = *config.seed;
  const std::size_t n = config.n_dialogues;
  const std::size_t n_customers = config.n_customers ? config.n_customers : n;
  const std::size_t V = config.n_planted_variables;
  const std::size_t P = config.products.size();

  SynthOutput out;
  auto& truth = out.truth;
  for (const auto& p : config.products) truth.products.push_back(p.id);

  // Vocabulary: filler words, then four words per planted variable
  // (two core words plus a prefix and a suffix).
  WordFactory words(stream_seed(seed, kVocabStream));
  std::vector<std::string> filler(config.n_filler_words);
  for (auto& w : filler) w = words.next();
  truth.variables.resize(V);
  for (std::size_t v = 0; v < V; ++v) {
    auto& pv = truth.variables[v];
    pv.id = v;
    if (!config.templates.empty()) {
      for (const auto& t : config.templates[v]) pv.templates.push_back(join(tokenize_words(t)));
    } else {
      const auto a = words.next(), b = words.next(), pre = words.next(), post = words.next();
      pv.templates = {a + " " + b, pre + " " + a + " " + b, a + " " + b + " " + post};
    }
    pv.activation = config.max_activation * std::pow(static_cast<double>(v + 1), -config.zipf_exponent);
  }

  {
    std::mt19937_64 rng(stream_seed(seed, kEffectStream));
    std::uniform_real_distribution<double> mag(config.effect_min, config.effect_max);
    std::uniform_real_distribution<double> scale(config.product_scale_min, 1.0);
    std::bernoulli_distribution positive(config.positive_share);
    for (std::size_t v = 0; v < V; ++v) {
      auto& e = truth.variables[v].log_odds;
      if (!config.effects.empty()) {
        e = config.effects[v];
        continue;
      }
      const double base = mag(rng) * (positive(rng) ? 1.0 : -1.0);
      e.resize(P);
      for (auto& x : e) x = base * scale(rng);
    }
  }

  // Customers: latent trait t, embedding t * loading + noise.
  std::vector<double> trait(n_customers);
  auto& emb = out.embeddings;
  emb.dim = config.embed_dim;
  emb.keys.resize(n_customers);
  emb.vectors.resize(n_customers);
  std::vector<double> loading(config.embed_dim);
  {
    std::mt19937_64 rng(stream_seed(seed, kLoadingStream));
    std::normal_distribution<double> g(0.0, 1.0);
    double norm = 0.0;
    for (auto& x : loading) {
      x = g(rng);
      norm += x * x;
    }
    for (auto& x : loading) x *= config.embedding_signal / std::sqrt(norm);
  }
  const std::size_t n_cblocks = (n_customers + kBlock - 1) / kBlock;
  parallel_for(n_cblocks, [&](std::size_t b) {
    std::mt19937_64 rng(stream_seed(seed, kTraitStream, b));
    std::normal_distribution<double> g(0.0, 1.0);
    for (std::size_t c = b * kBlock; c < std::min(n_customers, (b + 1) * kBlock); ++c) {
      char id[32];
      std::snprintf(id, sizeof id, "c%07zu", c);
      emb.keys[c] = id;
      trait[c] = g(rng);
      auto& vec = emb.vectors[c];
      vec.resize(config.embed_dim);
      for (std::size_t j = 0; j < config.embed_dim; ++j)
        vec[j] = static_cast<double>(static_cast<float>(trait[c] * loading[j] + config.embedding_noise * g(rng)));
    }
  });

  // Dialogue structure and text.
  std::vector<double> share;
  for (const auto& p : config.products) share.push_back(p.offer_share);
  std::vector<Structure> st(n);
  const std::size_t n_blocks = (n + kBlock - 1) / kBlock;
  const auto& function_words = filler_function_words();
  parallel_for(n_blocks, [&](std::size_t b) {
    std::mt19937_64 rng(stream_seed(seed, kStructureStream, b));
    std::discrete_distribution<std::size_t> product(share.begin(), share.end());
    std::uniform_int_distribution<std::size_t> customer(0, n_customers - 1);
    std::uniform_int_distribution<std::size_t> lines(config.min_customer_lines, config.max_customer_lines);
    std::uniform_int_distribution<std::size_t> filler_word(0, filler.size() - 1);
    std::uniform_int_distribution<std::size_t> function_word(0, function_words.size() - 1);
    std::uniform_int_distribution<int> sentence_len(4, 9), pad(1, 3), month(1, 12), day(1, 28);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto word = [&] { return u(rng) < 0.3 ? function_words[function_word(rng)] : filler[filler_word(rng)]; };
    auto sentence = [&](std::size_t len) {
      std::vector<std::string> w(len);
      for (auto& x : w) x = word();
      return join(w) + ".";
    };
    for (std::size_t i = b * kBlock; i < std::min(n, (b + 1) * kBlock); ++i) {
      auto& s = st[i];
      const std::size_t c = config.n_customers ? customer(rng) : i;
      s.customer = c;
      s.customer_id = emb.keys[c];
      s.product = product(rng);
      char ts[16];
      std::snprintf(ts, sizeof ts, "2021-%02d-%02d", month(rng), day(rng));
      s.timestamp = ts;
      const std::size_t n_lines = lines(rng);
      std::vector<std::vector<std::string>> line_sentences(n_lines);
      for (auto& l : line_sentences) {
        l.push_back(sentence(static_cast<std::size_t>(sentence_len(rng))));
        if (u(rng) < 0.5) l.push_back(sentence(static_cast<std::size_t>(sentence_len(rng))));
      }
      std::uniform_int_distribution<std::size_t> pick_line(0, n_lines - 1);
      for (std::size_t v = 0; v < V; ++v) {
        const auto& pv = truth.variables[v];
        if (u(rng) >= pv.activation) continue;
        const bool neg = u(rng) < config.negation_rate;
        std::uniform_int_distribution<std::size_t> pick_t(0, pv.templates.size() - 1);
        std::vector<std::string> w;
        for (int k = pad(rng); k > 0; --k) w.push_back(word());
        if (neg) w.push_back("not");
        w.push_back(pv.templates[pick_t(rng)]);
        for (int k = pad(rng); k > 0; --k) w.push_back(word());
        auto& l = line_sentences[pick_line(rng)];
        std::uniform_int_distribution<std::size_t> at(0, l.size());
        l.insert(l.begin() + static_cast<long>(at(rng)), join(w) + ".");
        (neg ? s.negated : s.active).push_back(static_cast<std::uint32_t>(v));
      }
      for (const auto& l : line_sentences) {
        std::string text;
        for (std::size_t k = 0; k < l.size(); ++k) text += (k ? " " : "") + l[k];
        s.customer_lines.push_back(std::move(text));
      }
    }
  });

  // Per-product intercepts so that the expected outcome share matches the
  // configured base rate.
  std::vector<double> shift(n);
  for (std::size_t i = 0; i < n; ++i) {
    double z = config.trait_weight * trait[st[i].customer];
    for (auto v : st[i].active) z += truth.variables[v].log_odds[st[i].product];
    shift[i] = z;
  }
  truth.intercepts.resize(P);
  for (std::size_t p = 0; p < P; ++p) {
    const double target = config.products[p].base_rate;
    std::vector<double> s;
    for (std::size_t i = 0; i < n; ++i)
      if (st[i].product == p) s.push_back(shift[i]);
    if (s.empty()) {
      truth.intercepts[p] = std::log(target / (1 - target));
      continue;
    }
    double lo = -40.0, hi = 40.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      double mean = 0.0;
      for (double x : s) mean += sigmoid(mid + x);
      mean /= static_cast<double>(s.size());
      (mean < target ? lo : hi) = mid;
    }
    truth.intercepts[p] = 0.5 * (lo + hi);
  }

  // Outcomes and assembly.
  auto& corpus = out.corpus;
  corpus.product_catalog = truth.products;
  corpus.dialogues.resize(n);
  truth.dialogues.resize(n);
  parallel_for(n_blocks, [&](std::size_t b) {
    std::mt19937_64 rng(stream_seed(seed, kOutcomeStream, b));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = b * kBlock; i < std::min(n, (b + 1) * kBlock); ++i) {
      auto& s = st[i];
      char id[32];
      std::snprintf(id, sizeof id, "d%07zu", i);
      const double pr = sigmoid(truth.intercepts[s.product] + shift[i]);
      const int outcome = u(rng) < pr ? 1 : 0;
      Dialogue d;
      d.dialogue_id = id;
      d.customer_id = s.customer_id;
      d.timestamp = s.timestamp;
      std::size_t idx = 0;
      d.utterances.push_back({Speaker::kManager, "good afternoon, thank you for calling the bank.", idx++});
      for (std::size_t k = 0; k < s.customer_lines.size(); ++k) {
        d.utterances.push_back({Speaker::kCustomer, s.customer_lines[k], idx++});
        if (k + 1 < s.customer_lines.size()) d.utterances.push_back({Speaker::kManager, "i see, go on.", idx++});
      }
      std::string product_words = truth.products[s.product];
      std::replace(product_words.begin(), product_words.end(), '_', ' ');
      d.utterances.push_back({Speaker::kManager, "we would like to offer you our " + product_words + ".", idx++});
      d.offers.push_back({truth.products[s.product], outcome});
      corpus.dialogues[i] = std::move(d);

      auto& dt = truth.dialogues[i];
      dt.dialogue_id = id;
      dt.active = s.active;
      dt.negated = s.negated;
      dt.trait = trait[s.customer];
      dt.propensity = {pr};
    }
  });
  for (const auto& s : st) {
    for (auto v : s.active) {
      ++truth.variables[v].realized_frequency;
      ++truth.variables[v].mention_frequency;
    }
    for (auto v : s.negated) ++truth.variables[v].mention_frequency;
  }
  return out;
}

void write_ground_truth(const GroundTruth& truth, const std::filesystem::path& path) {
  nlohmann::json j;
  j["products"] = truth.products;
  j["intercepts"] = truth.intercepts;
  auto& vars = j["variables"] = nlohmann::json::array();
  for (const auto& v : truth.variables)
    vars.push_back({{"id", v.id},
                    {"templates", v.templates},
                    {"log_odds", v.log_odds},
                    {"activation", v.activation},
                    {"realized_frequency", v.realized_frequency},
                    {"mention_frequency", v.mention_frequency}});
  auto& ds = j["dialogues"] = nlohmann::json::array();
  for (const auto& d : truth.dialogues)
    ds.push_back({{"dialogue_id", d.dialogue_id},
                  {"active", d.active},
                  {"negated", d.negated},
                  {"trait", d.trait},
                  {"propensity", d.propensity}});
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw Error("unwritable", "cannot write " + path.string());
  out << j.dump() << '\n';
}

GroundTruth read_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("missing_artifact", "missing artifact: ground truth (" + path.string() + ")");
  nlohmann::json j;
  in >> j;
  GroundTruth t;
  t.products = j.at("products").get<std::vector<std::string>>();
  t.intercepts = j.at("intercepts").get<std::vector<double>>();
  for (const auto& v : j.at("variables")) {
    PlantedVariable pv;
    pv.id = v.at("id");
    pv.templates = v.at("templates").get<std::vector<std::string>>();
    pv.log_odds = v.at("log_odds").get<std::vector<double>>();
    pv.activation = v.at("activation");
    pv.realized_frequency = v.at("realized_frequency");
    pv.mention_frequency = v.at("mention_frequency");
    t.variables.push_back(std::move(pv));
  }
  for (const auto& d : j.at("dialogues")) {
    DialogueTruth dt;
    dt.dialogue_id = d.at("dialogue_id");
    dt.active = d.at("active").get<std::vector<std::uint32_t>>();
    dt.negated = d.at("negated").get<std::vector<std::uint32_t>>();
    dt.trait = d.at("trait");
    dt.propensity = d.at("propensity").get<std::vector<double>>();
    t.dialogues.push_back(std::move(dt));
  }
  return t;
}

Registry registry_from_truth(const GroundTruth& truth, bool with_negation) {
  std::vector<SelectedCluster> clusters;
  NegationConfig negation;
  for (const auto& v : truth.variables) {
    SelectedCluster c;
    c.cluster_id = static_cast<int>(v.id);
    c.phrases = v.templates;
    for (std::size_t p = 0; p < truth.products.size() && p < v.log_odds.size(); ++p)
      if (v.log_odds[p] != 0.0) c.significant_products.push_back(truth.products[p]);
    clusters.push_back(std::move(c));
    if (with_negation) negation.negated_clusters.insert(static_cast<int>(v.id));
  }
  return build_registry(std::move(clusters), negation);
}

RecoveryScore score_recovery(const std::vector<std::vector<std::string>>& phrase_sets, const GroundTruth& truth,
                             const std::vector<std::size_t>* eligible) {
  std::unordered_map<std::string, std::size_t> owner;
  for (const auto& v : truth.variables)
    for (const auto& t : v.templates) owner.emplace(t, v.id);
  std::vector<bool> recovered(truth.variables.size(), false);
  std::size_t matching_sets = 0;
  for (const auto& set : phrase_sets) {
    bool any = false;
    for (const auto& p : set) {
      auto it = owner.find(p);
      if (it == owner.end()) continue;
      recovered[it->second] = true;
      any = true;
    }
    if (any) ++matching_sets;
  }
  RecoveryScore r;
  std::vector<std::size_t> all;
  if (!eligible) {
    all.resize(truth.variables.size());
    std::iota(all.begin(), all.end(), 0);
    eligible = &all;
  }
  r.considered = eligible->size();
  for (auto v : *eligible)
    if (recovered.at(v)) ++r.recovered;
  r.recall = r.considered ? static_cast<double>(r.recovered) / static_cast<double>(r.considered) : 0.0;
  r.precision = phrase_sets.empty() ? 0.0 : static_cast<double>(matching_sets) / static_cast<double>(phrase_sets.size());
  return r;
}

RecoveryScore score_recovery(const Registry& registry, const GroundTruth& truth,
                             const std::vector<std::size_t>* eligible) {
  std::vector<std::vector<std::string>> sets;
  for (const auto& v : registry.variables)
    if (v.polarity == Polarity::kPositive) sets.push_back(v.phrases);
  return score_recovery(sets, truth, eligible);
}

}  // namespace ltc
