#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ltc/corpus.hpp"
#include "ltc/features.hpp"
#include "ltc/registry.hpp"

namespace ltc {

struct SynthProduct {
  ProductId id;
  double base_rate = 0.25;    // target share of outcome 1 among dialogues offering it
  double offer_share = 0.25;  // relative weight when drawing the offered product
};

struct SynthConfig {
  std::size_t n_dialogues = 50000;
  std::size_t n_customers = 0;  // 0 = one customer per dialogue
  std::vector<SynthProduct> products = {{"business_account", 0.2428, 126478},
                                        {"acquiring", 0.2471, 58750},
                                        {"salary", 0.4113, 56564},
                                        {"leasing", 0.1844, 5564}};
  std::size_t n_planted_variables = 200;
  double zipf_exponent = 1.1;
  double max_activation = 0.9;  // mention probability of the rank-1 variable
  // Drawn per variable when `effects` is empty: magnitude uniform in
  // [effect_min, effect_max], positive with probability positive_share, then
  // scaled per product by a factor uniform in [product_scale_min, 1].
  double effect_min = 1.0;
  double effect_max = 2.5;
  double positive_share = 0.75;
  double product_scale_min = 0.6;
  std::vector<std::vector<double>> effects;      // [variable][product] log-odds, optional
  std::vector<std::vector<std::string>> templates;  // [variable] phrases, optional
  std::size_t n_filler_words = 1500;
  double negation_rate = 0.1;
  std::size_t embed_dim = 16;
  double trait_weight = 1.0;       // log-odds per unit of customer trait
  double embedding_signal = 1.0;   // trait loading norm in the embedding
  double embedding_noise = 1.0;    // per-coordinate noise sd
  std::size_t min_customer_lines = 2;
  std::size_t max_customer_lines = 4;
  std::optional<std::uint64_t> seed;
};

struct PlantedVariable {
  std::size_t id = 0;  // = rank - 1
  std::vector<std::string> templates;
  std::vector<double> log_odds;  // per product, config order
  double activation = 0.0;
  std::size_t realized_frequency = 0;  // dialogues where the variable is active
  std::size_t mention_frequency = 0;   // dialogues containing a template, negated or not
};

struct DialogueTruth {
  std::string dialogue_id;
  std::vector<std::uint32_t> active;   // planted ids, sorted
  std::vector<std::uint32_t> negated;  // mentioned only under negation
  double trait = 0.0;
  std::vector<double> propensity;  // per offer, true probability of outcome 1
};

struct GroundTruth {
  std::vector<ProductId> products;
  std::vector<double> intercepts;  // calibrated per product
  std::vector<PlantedVariable> variables;
  std::vector<DialogueTruth> dialogues;
};

struct SynthOutput {
  Corpus corpus;
  CustomerEmbeddings embeddings;
  GroundTruth truth;
};

SynthOutput generate(const SynthConfig& config);

void write_ground_truth(const GroundTruth& truth, const std::filesystem::path& path);
GroundTruth read_ground_truth(const std::filesystem::path& path);

// One positive variable per planted variable (its templates as phrases), with
// negated twins when `with_negation`.
Registry registry_from_truth(const GroundTruth& truth, bool with_negation = false);

struct RecoveryScore {
  double precision = 0.0;
  double recall = 0.0;
  std::size_t recovered = 0;
  std::size_t considered = 0;
};

// A planted variable is recovered when some phrase set intersects its
// templates. `eligible` restricts recall to a subset of planted ids.
RecoveryScore score_recovery(const std::vector<std::vector<std::string>>& phrase_sets, const GroundTruth& truth,
                             const std::vector<std::size_t>* eligible = nullptr);
RecoveryScore score_recovery(const Registry& registry, const GroundTruth& truth,
                             const std::vector<std::size_t>* eligible = nullptr);

}  // namespace ltc
