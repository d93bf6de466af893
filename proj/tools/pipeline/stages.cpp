#include "stages.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "ltc/annotation.hpp"
#include "ltc/cluster_stats.hpp"
#include "ltc/clustering.hpp"
#include "ltc/corpus.hpp"
#include "ltc/curation_service.hpp"
#include "ltc/embedding.hpp"
#include "ltc/features.hpp"
#include "ltc/hashing.hpp"
#include "ltc/models.hpp"
#include "ltc/pca.hpp"
#include "ltc/phrasing.hpp"
#include "ltc/registry.hpp"
#include "ltc/report.hpp"
#include "ltc/synthgen.hpp"
#include "ltc/text.hpp"
#include "sweep_io.hpp"

namespace ltc::cli {

namespace fs = std::filesystem;

struct Pipeline::Context {
  ArtifactStore& store;
  fs::path dir;
  StageRecord record;

  fs::path file(const std::string& name) const { return dir / name; }
  void put(const std::string& alias, const fs::path& path) { record.outputs[alias] = store.put_file(alias, path); }
  void note(std::string text) { record.notes.push_back(std::move(text)); }
};

namespace {

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error("unwritable", "cannot write " + p.string());
}

ModelSpec model_spec(const Config& c) {
  ModelSpec spec;
  spec.kind = parse_model_kind(c.str("models.model"));
  return spec;
}

}  // namespace

const std::vector<std::string>& Pipeline::stage_names() {
  static const std::vector<std::string> names = {"ingest", "clean",    "phrases", "embed",    "cluster",
                                                 "stats",  "curate-serve", "registry", "annotate", "train",
                                                 "sweep",  "report",   "synth"};
  return names;
}

const std::vector<Pipeline::StageDef>& Pipeline::stages() {
  using Ext = std::vector<std::pair<std::string, std::string>>;
  auto none = [](const Pipeline&) { return Ext{}; };
  static const std::vector<StageDef> defs = {
      {"synth", {}, {"synth", "run"}, none, &Pipeline::synth},
      {"ingest",
       {},
       {"corpus", "features"},
       [](const Pipeline& p) {
         Ext ext;
         const auto& path = p.config_.str("corpus.path");
         if (path.empty()) throw Error("config", "corpus.path is not set; run synth or configure a corpus");
         ext.emplace_back("corpus.path", sha256_file(path));
         const auto& emb = p.config_.str("features.customer_embeddings");
         if (!emb.empty()) ext.emplace_back("features.customer_embeddings", sha256_file(emb));
         return ext;
       },
       &Pipeline::ingest},
      {"clean", {"corpus.jsonl"}, {"corpus"}, none, &Pipeline::clean},
      {"phrases", {"clean_corpus.jsonl"}, {"phrasing"}, none, &Pipeline::phrases},
      {"embed", {"candidates.tsv"}, {"embedding"}, none, &Pipeline::embed},
      {"cluster", {"phrase_vectors.ltcv"}, {"clustering"}, none, &Pipeline::cluster},
      {"stats", {"clusters.tsv", "clean_corpus.jsonl"}, {"stats"}, none, &Pipeline::stats},
      {"registry",
       {"cluster_report.tsv", "clusters.tsv", "candidates.tsv"},
       {"registry"},
       [](const Pipeline& p) {
         Ext ext;
         const auto votes = p.votes_path();
         if (fs::exists(votes)) ext.emplace_back("votes", sha256_file(votes));
         return ext;
       },
       &Pipeline::registry},
      {"annotate", {"clean_corpus.jsonl", "registry.json"}, {}, none, &Pipeline::annotate},
      {"train",
       {"annotations.tsv", "registry.json", "clean_corpus.jsonl", "customer_embeddings.ltcv"},
       {"features", "models", "evaluation", "run"},
       none,
       &Pipeline::train},
      {"sweep",
       {"annotations.tsv", "registry.json", "clean_corpus.jsonl", "customer_embeddings.ltcv"},
       {"features", "models", "evaluation", "run"},
       none,
       &Pipeline::sweep},
      {"report", {"sweep.json"}, {}, none, &Pipeline::report},
  };
  return defs;
}

const Pipeline::StageDef& Pipeline::stage(const std::string& name) {
  for (const auto& d : stages())
    if (d.name == name) return d;
  throw Error("usage", "unknown stage: " + name);
}

Pipeline::Pipeline(Config config, ArtifactStore& store, bool auto_upstream, std::ostream& log)
    : config_(std::move(config)), store_(store), auto_upstream_(auto_upstream), log_(log) {}

std::string Pipeline::producer(const std::string& alias) const {
  if (alias == "corpus.jsonl" || alias == "customer_embeddings.ltcv") {
    if (store_.has(alias)) {
      const auto h = store_.hash(alias);
      for (const char* s : {"synth", "ingest"}) {
        auto rec = store_.record(s);
        if (rec && rec->outputs.count(alias) && rec->outputs.at(alias) == h) return s;
      }
    }
    return config_.str("corpus.path").empty() ? "synth" : "ingest";
  }
  if (alias == "ground_truth.json") return "synth";
  for (const auto& d : stages()) {
    if (d.name == "synth" || d.name == "ingest") continue;
    auto rec = store_.record(d.name);
    if (rec && rec->outputs.count(alias)) return d.name;
  }
  static const std::map<std::string, std::string> fixed = {
      {"clean_corpus.jsonl", "clean"},   {"cleaning_report.txt", "clean"}, {"candidates.tsv", "phrases"},
      {"phrase_vectors.ltcv", "embed"},  {"clusters.tsv", "cluster"},      {"cluster_selection.tsv", "cluster"},
      {"cluster_report.tsv", "stats"},   {"registry.json", "registry"},    {"annotations.tsv", "annotate"},
      {"model.json", "train"},           {"sweep.json", "sweep"}};
  auto it = fixed.find(alias);
  return it == fixed.end() ? std::string{} : it->second;
}

void Pipeline::require(const std::string& alias) {
  const auto up = producer(alias);
  if (auto_upstream_ && !up.empty()) run(up);
  if (!store_.has(alias)) {
    std::string name = alias.substr(0, alias.find('.'));
    if (name == "clean_corpus") name = "clean corpus";
    throw Error("missing_artifact", "missing artifact: " + name + " (run `ltc " + up + "` first or pass --auto)");
  }
}

void Pipeline::run(const std::string& name) {
  if (visited_.count(name)) return;
  const StageDef& def = stage(name);
  for (const auto& in : def.inputs) require(in);

  StageRecord rec;
  for (const auto& in : def.inputs) rec.inputs[in] = store_.hash(in);
  for (const auto& [label, h] : def.external(*this)) rec.inputs[label] = h;
  rec.config_hash = sha256_hex(config_.canonical(def.sections));

  if (auto prev = store_.record(name)) {
    bool fresh = prev->inputs == rec.inputs && prev->config_hash == rec.config_hash && !prev->outputs.empty();
    for (const auto& [alias, h] : prev->outputs)
      fresh = fresh && store_.has(alias) && store_.hash(alias) == h;
    if (fresh) {
      visited_.insert(name);
      outcomes_.push_back({name, false, 0.0});
      log_ << "stage " << name << ": up to date\n";
      return;
    }
  }

  const auto start = std::chrono::steady_clock::now();
  Context ctx{store_, store_.scratch(name), rec};
  def.body(*this, ctx);
  ctx.record.timestamp = utc_timestamp();
  ctx.record.tool_version = kToolVersion;
  store_.set_record(name, ctx.record);
  fs::remove_all(ctx.dir);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  visited_.insert(name);
  outcomes_.push_back({name, true, secs});
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", secs);
  log_ << "stage " << name << ": done in " << buf << "s\n";
}

fs::path Pipeline::votes_path() const {
  const auto& v = config_.str("registry.votes");
  return v.empty() ? store_.root() / "votes.tsv" : fs::path(v);
}

void Pipeline::synth(Context& ctx) {
  SynthConfig sc;
  sc.n_dialogues = config_.size("synth.n_dialogues");
  sc.n_customers = config_.size("synth.n_customers");
  sc.n_planted_variables = config_.size("synth.n_planted_variables");
  sc.zipf_exponent = config_.real("synth.zipf_exponent");
  sc.max_activation = config_.real("synth.max_activation");
  sc.effect_min = config_.real("synth.effect_min");
  sc.effect_max = config_.real("synth.effect_max");
  sc.negation_rate = config_.real("synth.negation_rate");
  sc.embed_dim = config_.size("synth.embed_dim");
  sc.seed = static_cast<std::uint64_t>(config_.integer("run.seed"));
  const auto out = generate(sc);
  write_corpus(out.corpus, ctx.file("corpus.jsonl"));
  write_keyed_vectors(ctx.file("customer_embeddings.ltcv"), out.embeddings);
  write_ground_truth(out.truth, ctx.file("ground_truth.json"));
  ctx.put("corpus.jsonl", ctx.file("corpus.jsonl"));
  ctx.put("customer_embeddings.ltcv", ctx.file("customer_embeddings.ltcv"));
  ctx.put("ground_truth.json", ctx.file("ground_truth.json"));
  log_ << "  " << out.corpus.dialogues.size() << " dialogues, " << out.truth.variables.size()
       << " planted variables\n";
}

void Pipeline::ingest(Context& ctx) {
  LoadOptions lo;
  lo.rejects_path = ctx.file("rejects.jsonl");
  lo.max_offers_per_dialogue = config_.size("corpus.max_offers_per_dialogue");
  LoadSummary summary;
  const auto corpus =
      load_corpus(config_.str("corpus.path"), parse_corpus_format(config_.str("corpus.format")), lo, &summary);
  write_corpus(corpus, ctx.file("corpus.jsonl"));
  ctx.put("corpus.jsonl", ctx.file("corpus.jsonl"));
  if (fs::exists(lo.rejects_path) && fs::file_size(lo.rejects_path) > 0)
    ctx.put("ingest_rejects.jsonl", lo.rejects_path);
  ctx.note("accepted=" + std::to_string(summary.accepted) + " rejected=" + std::to_string(summary.rejected) +
           " over_offer_limit=" + std::to_string(summary.over_offer_limit));
  const auto& emb = config_.str("features.customer_embeddings");
  if (!emb.empty()) {
    const auto kv = read_keyed_vectors(emb);
    write_keyed_vectors(ctx.file("customer_embeddings.ltcv"), kv);
    ctx.put("customer_embeddings.ltcv", ctx.file("customer_embeddings.ltcv"));
  }
  log_ << "  accepted " << summary.accepted << ", rejected " << summary.rejected << "\n";
}

void Pipeline::clean(Context& ctx) {
  const auto corpus = load_corpus(store_.path("corpus.jsonl"), CorpusFormat::kJsonLines);
  CleaningOptions co;
  co.min_customer_lines = config_.size("corpus.min_customer_lines");
  co.concatenate_repeat_transcripts = config_.flag("corpus.concatenate_repeats");
  const auto [cleaned, report] = clean_corpus(corpus, co);
  write_corpus(cleaned, ctx.file("clean_corpus.jsonl"));
  write_text(ctx.file("cleaning_report.txt"), report.to_key_value());
  ctx.put("clean_corpus.jsonl", ctx.file("clean_corpus.jsonl"));
  ctx.put("cleaning_report.txt", ctx.file("cleaning_report.txt"));
  log_ << "  kept " << report.output_size << " of " << report.input_size << " dialogues\n";
}

void Pipeline::phrases(Context& ctx) {
  const auto corpus = load_corpus(store_.path("clean_corpus.jsonl"), CorpusFormat::kJsonLines);
  const auto tokens = tokenize_corpus(corpus);
  CandidateOptions opt;
  opt.max_len = config_.size("phrasing.max_len");
  opt.drop_stop_phrases = config_.flag("phrasing.drop_stop_phrases");
  const auto all = generate_candidates(corpus, tokens, opt);
  auto supported = filter_by_support(all, config_.size("phrasing.min_support"));
  count_product_outcomes(supported, corpus, tokens);
  SignificanceOptions so;
  so.alpha = config_.real("phrasing.alpha");
  so.bonferroni = config_.flag("phrasing.bonferroni");
  const auto significant = select_significant(supported, corpus, so);
  write_candidate_table(significant, ctx.file("candidates.tsv"));
  ctx.put("candidates.tsv", ctx.file("candidates.tsv"));
  ctx.note("generated=" + std::to_string(all.size()) + " supported=" + std::to_string(supported.size()) +
           " significant=" + std::to_string(significant.size()));
  log_ << "  " << all.size() << " n-grams, " << supported.size() << " with support, " << significant.size()
       << " significant\n";
}

void Pipeline::embed(Context& ctx) {
  const auto table = read_candidate_table(store_.path("candidates.tsv"));
  std::vector<std::string> phrases;
  for (const auto& r : table.rows) phrases.push_back(r.phrase);
  std::unique_ptr<EmbeddingProvider> provider;
  const auto& kind = config_.str("embedding.provider");
  if (kind == "hashing") {
    provider = std::make_unique<HashingEmbeddingProvider>(static_cast<std::uint64_t>(config_.integer("embedding.seed")),
                                                          config_.size("embedding.dim"));
  } else if (kind == "remote") {
    RemoteEmbeddingOptions ro;
    ro.host = config_.str("embedding.remote_host");
    ro.port = static_cast<int>(config_.integer("embedding.remote_port"));
    ro.path = config_.str("embedding.remote_path");
    ro.expected_dimension = config_.size("embedding.dim");
    provider = std::make_unique<RemoteEmbeddingProvider>(ro);
  } else {
    throw Error("config", "embedding.provider must be hashing or remote, got '" + kind + "'");
  }
  std::unique_ptr<EmbeddingCache> cache;
  if (config_.flag("embedding.cache"))
    cache = std::make_unique<EmbeddingCache>(store_.root() / "cache" / "embeddings", provider->id());
  const auto vectors = embed_phrases(phrases, *provider, cache.get());
  KeyedVectors kv;
  kv.dim = provider->dimension();
  for (const auto& pv : vectors) {
    if (kv.dim == 0) kv.dim = pv.vector.size();
    kv.keys.push_back(pv.phrase);
    kv.vectors.push_back(pv.vector);
  }
  write_keyed_vectors(ctx.file("phrase_vectors.ltcv"), kv);
  ctx.put("phrase_vectors.ltcv", ctx.file("phrase_vectors.ltcv"));
  log_ << "  " << kv.keys.size() << " phrases embedded with " << provider->id() << "\n";
}

void Pipeline::cluster(Context& ctx) {
  const auto kv = read_keyed_vectors(store_.path("phrase_vectors.ltcv"));
  const std::size_t n = kv.keys.size();
  if (n < 3) throw Error("degenerate", "need at least 3 significant phrases to cluster, found " + std::to_string(n));
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(kv.dim));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < kv.dim; ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = kv.vectors[i][j];
  const std::size_t k = std::min({config_.size("clustering.pca_components"), n, kv.dim});
  const auto pca = pca_fit(x, k);
  const Eigen::MatrixXd points = pca_transform(pca, x);

  const auto& method = config_.str("clustering.method");
  ClusterAssignment best;
  std::ostringstream log;
  log << "method\tparams\tn_clusters\tn_noise\tsilhouette\tselected\n";
  if (method == "auto") {
    const auto sel =
        select_clustering(points, default_cluster_grid(points), config_.real("clustering.max_noise_fraction"));
    best = sel.best;
    for (const auto& e : sel.log) {
      char sil[32] = "NA";
      if (e.silhouette) std::snprintf(sil, sizeof sil, "%.17g", *e.silhouette);
      const char* verdict = e.config.describe() == best.config.describe() ? "1" : e.eligible ? "0" : "noise";
      log << to_string(e.config.method) << '\t' << e.config.describe() << '\t' << e.n_clusters << '\t' << e.n_noise
          << '\t' << sil << '\t' << verdict << '\n';
    }
  } else {
    if (method == "dbscan")
      best = dbscan(points, config_.real("clustering.eps"), config_.size("clustering.min_pts"));
    else if (method == "agglomerative")
      best = agglomerative(points, parse_linkage(config_.str("clustering.linkage")),
                           config_.size("clustering.n_clusters"));
    else
      throw Error("config", "clustering.method must be auto, dbscan or agglomerative, got '" + method + "'");
    char sil[32] = "NA";
    if (best.n_clusters >= 2) std::snprintf(sil, sizeof sil, "%.17g", silhouette(points, best.labels));
    log << to_string(best.config.method) << '\t' << best.config.describe() << '\t' << best.n_clusters << '\t'
        << best.n_noise() << '\t' << sil << "\t1\n";
  }
  write_cluster_assignment(best, kv.keys, ctx.file("clusters.tsv"));
  write_text(ctx.file("cluster_selection.tsv"), log.str());
  ctx.put("clusters.tsv", ctx.file("clusters.tsv"));
  ctx.put("cluster_selection.tsv", ctx.file("cluster_selection.tsv"));
  log_ << "  " << best.n_clusters << " clusters (" << best.config.describe() << "), " << best.n_noise()
       << " noise phrases\n";
}

void Pipeline::stats(Context& ctx) {
  const auto [assignment, phrases] = read_cluster_assignment(store_.path("clusters.tsv"));
  const auto corpus = load_corpus(store_.path("clean_corpus.jsonl"), CorpusFormat::kJsonLines);
  const auto tokens = tokenize_corpus(corpus);
  const auto stats = compute_cluster_stats(assignment, phrases, corpus, tokens);
  PruneThresholds th;
  th.min_size = config_.size("stats.min_size");
  th.min_rate_deviation = config_.real("stats.min_rate_deviation");
  th.max_past_tense = config_.real("stats.max_past_tense");
  const auto pruned = prune_clusters(stats, th, corpus_baseline_rate(corpus));
  std::vector<ClusterReportRow> rows;
  for (std::size_t i = 0; i < stats.size(); ++i)
    rows.push_back({stats[i], pruned.log[i].kept, pruned.log[i].rule});
  write_cluster_report(rows, ctx.file("cluster_report.tsv"));
  ctx.put("cluster_report.tsv", ctx.file("cluster_report.tsv"));
  log_ << "  " << pruned.kept.size() << " of " << stats.size() << " clusters kept\n";
}

namespace {

struct CurationInputs {
  std::vector<CurationCluster> clusters;
};

CurationInputs curation_inputs(const ArtifactStore& store) {
  const auto report = read_cluster_report(store.path("cluster_report.tsv"));
  const auto [assignment, phrases] = read_cluster_assignment(store.path("clusters.tsv"));
  const auto table = read_candidate_table(store.path("candidates.tsv"));
  std::map<std::string, const CandidateRow*> by_phrase;
  for (const auto& r : table.rows) by_phrase[r.phrase] = &r;
  std::map<int, std::vector<std::string>> members;
  for (std::size_t i = 0; i < phrases.size(); ++i)
    if (assignment.labels[i] != kNoise) members[assignment.labels[i]].push_back(phrases[i]);
  CurationInputs in;
  for (const auto& row : report) {
    if (!row.kept) continue;
    CurationCluster c;
    c.stats = row.stats;
    c.phrases = members[row.stats.cluster_id];
    std::set<ProductId> products;
    for (const auto& p : c.phrases)
      if (auto it = by_phrase.find(p); it != by_phrase.end())
        products.insert(it->second->significant_products.begin(), it->second->significant_products.end());
    c.significant_products.assign(products.begin(), products.end());
    in.clusters.push_back(std::move(c));
  }
  return in;
}

NegationConfig negation_config(const Config& config, const std::vector<int>& cluster_ids) {
  NegationConfig neg;
  neg.cues = config.list("registry.negation_cues");
  neg.window = config.size("registry.negation_window");
  const auto& which = config.str("registry.negated_clusters");
  if (which == "all") {
    neg.negated_clusters.insert(cluster_ids.begin(), cluster_ids.end());
  } else if (which != "none" && !which.empty()) {
    for (const auto& id : config.list("registry.negated_clusters")) {
      try {
        neg.negated_clusters.insert(std::stoi(id));
      } catch (const std::exception&) {
        throw Error("config", "registry.negated_clusters: bad cluster id '" + id + "'");
      }
    }
  }
  return neg;
}

}  // namespace

void Pipeline::registry(Context& ctx) {
  const auto in = curation_inputs(store_);
  std::vector<int> ids;
  for (const auto& c : in.clusters) ids.push_back(c.stats.cluster_id);
  std::vector<int> selected;
  const auto votes = votes_path();
  if (fs::exists(votes)) {
    CoverageReport coverage;
    const auto table = ingest_votes(read_votes_file(votes), config_.list("registry.roster"), ids, &coverage);
    selected = majority_select(table, config_.list("registry.roster"), ids);
    ctx.note("votes=" + votes.string() + " coverage=" + std::to_string(coverage.coverage()));
    if (!coverage.uncovered_clusters.empty())
      log_ << "  warning: " << coverage.uncovered_clusters.size()
           << " clusters lack a vote from every expert; missing votes count as reject\n";
  } else {
    selected = ids;
    ctx.note("no votes file; every kept cluster auto-accepted");
    log_ << "  no votes file at " << votes.string() << "; auto-accepting " << ids.size() << " clusters\n";
  }
  std::vector<SelectedCluster> chosen;
  for (const auto& c : in.clusters)
    if (std::binary_search(selected.begin(), selected.end(), c.stats.cluster_id))
      chosen.push_back({c.stats.cluster_id, c.phrases, c.significant_products});
  const auto reg = build_registry(chosen, negation_config(config_, selected));
  write_registry(reg, ctx.file("registry.json"));
  ctx.put("registry.json", ctx.file("registry.json"));
  ctx.note("registry_hash=" + reg.hash());
  log_ << "  " << reg.variables.size() << " contextual variables from " << chosen.size() << " clusters\n";
}

void Pipeline::curate_serve() {
  for (const char* in : {"cluster_report.tsv", "clusters.tsv", "candidates.tsv"}) require(in);
  auto in = curation_inputs(store_);
  std::vector<int> ids;
  for (const auto& c : in.clusters) ids.push_back(c.stats.cluster_id);
  CurationOptions opt;
  opt.roster = config_.list("registry.roster");
  opt.votes_path = votes_path();
  opt.registry_path = store_.root() / "curated_registry.json";
  opt.static_dir = config_.str("curation.static_dir");
  opt.negation = negation_config(config_, ids);
  opt.hide_stats = config_.flag("curation.hide_stats");
  opt.host = config_.str("curation.host");
  CurationService service(std::move(in.clusters), opt);
  const int port = service.bind(static_cast<int>(config_.integer("curation.port")));
  log_ << "curation service listening on http://" << opt.host << ":" << port << "/ (" << ids.size()
       << " clusters, votes in " << opt.votes_path.string() << ")\n";
  log_.flush();
  service.serve();
}

namespace {

Annotations checked_annotations(const ArtifactStore& store) {
  auto ann = read_annotations(store.path("annotations.tsv"));
  const auto reg = read_registry(store.path("registry.json"));
  if (ann.registry_hash != reg.hash())
    throw Error("registry_skew", "annotations were built for registry " + ann.registry_hash +
                                     " but the current registry is " + reg.hash() + "; rerun `ltc annotate`");
  return ann;
}

MissingEmbedding missing_policy(const Config& c) {
  const auto& m = c.str("features.missing_embedding");
  if (m == "drop") return MissingEmbedding::kDrop;
  if (m == "zero") return MissingEmbedding::kZero;
  throw Error("config", "features.missing_embedding must be drop or zero, got '" + m + "'");
}

std::vector<ProductId> evaluation_products(const Config& c, const Corpus& corpus) {
  auto products = c.list("evaluation.products");
  if (products.empty()) products = corpus.product_catalog;
  for (const auto& p : products)
    if (std::find(corpus.product_catalog.begin(), corpus.product_catalog.end(), p) == corpus.product_catalog.end())
      throw Error("unknown_product", "product not in the corpus catalog: " + p);
  return products;
}

}  // namespace

void Pipeline::annotate(Context& ctx) {
  const auto corpus = load_corpus(store_.path("clean_corpus.jsonl"), CorpusFormat::kJsonLines);
  const auto reg = read_registry(store_.path("registry.json"));
  const auto ann = annotate_corpus(corpus, reg);
  write_annotations(ann, ctx.file("annotations.tsv"));
  ctx.put("annotations.tsv", ctx.file("annotations.tsv"));
  for (const auto& [product, share] : context_coverage(corpus, ann)) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", share);
    ctx.note("coverage " + product + "=" + buf);
  }
  log_ << "  " << ann.dialogue_ids.size() << " dialogues annotated with " << ann.n_variables << " variables\n";
}

void Pipeline::train(Context& ctx) {
  const auto corpus = load_corpus(store_.path("clean_corpus.jsonl"), CorpusFormat::kJsonLines);
  const auto ann = checked_annotations(store_);
  const auto emb = read_keyed_vectors(store_.path("customer_embeddings.ltcv"));
  ProductId product = config_.str("models.product");
  if (product.empty()) product = evaluation_products(config_, corpus).at(0);
  FeatureOptions fo;
  fo.missing = missing_policy(config_);
  const auto table = build_features(corpus, product, emb, ann, fo);
  auto model = ltc::train(table, model_spec(config_), static_cast<std::uint64_t>(config_.integer("run.seed")));
  model.registry_hash = ann.registry_hash;
  save_model(model, ctx.file("model.json"));
  ctx.put("model.json", ctx.file("model.json"));
  ctx.note("product=" + product + " rows=" + std::to_string(table.size()));
  log_ << "  trained " << model.spec.describe() << " on " << table.size() << " rows of " << product << "\n";
}

void Pipeline::sweep(Context& ctx) {
  const auto corpus = load_corpus(store_.path("clean_corpus.jsonl"), CorpusFormat::kJsonLines);
  const auto ann = checked_annotations(store_);
  const auto emb = read_keyed_vectors(store_.path("customer_embeddings.ltcv"));
  FeatureOptions fo;
  fo.missing = missing_policy(config_);
  RankOptions ro;
  ro.rate_min_support = config_.size("evaluation.rate_min_support");
  SweepConfig sc;
  sc.model = model_spec(config_);
  sc.q_list = config_.reals("evaluation.q_list");
  sc.folds = config_.size("evaluation.folds");
  sc.seed = static_cast<std::uint64_t>(config_.integer("run.seed"));
  sc.threshold = config_.real("evaluation.threshold");

  SweepArtifact out;
  for (const auto& product : evaluation_products(config_, corpus)) {
    const auto table = build_features(corpus, product, emb, ann, fo);
    for (const auto& crit : config_.list("evaluation.criteria")) {
      sc.criterion = parse_criterion(crit);
      auto ranking = rank_variables(corpus, ann, product, sc.criterion, ro);
      try {
        out.reports.push_back(ltc::sweep(table, ranking, sc));
      } catch (const Error& e) {
        ctx.note("skipped " + product + "/" + crit + ": " + e.what());
        log_ << "  skipped " << product << "/" << crit << ": " << e.what() << "\n";
        continue;
      }
      out.rankings.push_back(std::move(ranking));
      const auto& r = out.reports.back();
      log_ << "  " << product << "/" << crit << ": " << r.rows.size() << " q points over " << r.n_rows << " rows\n";
    }
  }
  if (out.reports.empty()) throw Error("degenerate", "no product could be evaluated");
  write_sweep(out, ctx.file("sweep.json"));
  ctx.put("sweep.json", ctx.file("sweep.json"));
}

void Pipeline::report(Context& ctx) {
  const auto s = read_sweep(store_.path("sweep.json"));
  std::vector<VariableRanking> tails;
  for (const auto& r : s.rankings)
    if (r.criterion == RankCriterion::kFrequency) tails.push_back(r);
  const auto files = export_report(s.reports, tails, ctx.dir / "out");
  for (const auto& f : files.files) ctx.put("report/" + f.filename().string(), f);
  log_ << "  " << files.files.size() << " report files in " << (store_.root() / "report").string() << "\n";
}

}  // namespace ltc::cli
