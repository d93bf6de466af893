#include "ltc/cluster_stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace ltc {

bool Lexicons::is_past_tense(std::string_view word) const {
  if (past_tense_words.count(word)) return true;
  if (word.size() < min_suffix_word_length) return false;
  for (const auto& s : past_tense_suffixes)
    if (word.size() > s.size() && word.substr(word.size() - s.size()) == s) return true;
  return false;
}

bool Lexicons::is_sentiment(std::string_view word) const { return sentiment_words.count(word) > 0; }

Lexicons Lexicons::english() {
  Lexicons lex;
  lex.past_tense_words = {"was",    "were",  "had",   "did",    "went",   "got",    "made",   "said",
                          "took",   "came",  "saw",   "knew",   "thought", "bought", "sold",   "paid",
                          "left",   "found", "gave",  "told",   "became", "began",  "brought", "built",
                          "felt",   "kept",  "lost",  "met",    "ran",    "sent",   "spent",  "stood",
                          "won",    "wrote", "heard", "held",   "meant",  "put",    "set",    "taught",
                          "understood", "hired", "opened", "closed"};
  lex.past_tense_suffixes = {"ed"};
  lex.sentiment_words = {"good",      "great",     "bad",         "terrible",   "happy",
                         "unhappy",   "excellent", "poor",        "love",       "hate",
                         "like",      "dislike",   "satisfied",   "disappointed", "glad",
                         "sad",       "awful",     "nice",        "wonderful",  "worried",
                         "angry",     "pleased",   "problem",     "problems",   "difficult",
                         "easy",      "best",      "worst",       "comfortable", "convenient",
                         "inconvenient", "expensive", "cheap",   "unfortunately", "fortunately"};
  return lex;
}

namespace {

const std::set<std::string, std::less<>>& suffix_exceptions() {
  static const std::set<std::string, std::less<>> kExceptions = {
      "need", "needs", "speed", "feed", "seed", "indeed", "breed", "proceed", "exceed", "succeed", "shed", "weed"};
  return kExceptions;
}

struct Accumulator {
  std::size_t occurrences = 0;
  double position = 0.0;
  double sentence_length = 0.0;
  std::size_t past = 0;
  std::size_t sentiment = 0;
  std::size_t dialogues = 0;
  std::size_t offers = 0;
  std::size_t positive_offers = 0;
};

}  // namespace

std::vector<ClusterStats> compute_cluster_stats(const ClusterAssignment& assignment,
                                                const std::vector<std::string>& phrases,
                                                const Corpus& corpus, const TokenizedCorpus& tokens,
                                                const Lexicons& lexicons) {
  if (phrases.size() != assignment.labels.size())
    throw Error("invalid_argument", "phrase list does not match cluster labels");
  const auto& vocab = *tokens.vocab;

  std::vector<bool> past(vocab.size()), senti(vocab.size());
  for (TokenId t = 0; t < vocab.size(); ++t) {
    const auto& w = vocab.word(t);
    past[t] = lexicons.is_past_tense(w) && !(suffix_exceptions().count(w) && !lexicons.past_tense_words.count(w));
    senti[t] = lexicons.is_sentiment(w);
  }

  std::unordered_map<TokenId, std::vector<std::pair<std::vector<TokenId>, int>>> by_first;
  for (std::size_t p = 0; p < phrases.size(); ++p) {
    if (assignment.labels[p] == kNoise) continue;
    auto ids = encode_phrase(vocab, phrases[p]);
    if (!ids) continue;
    by_first[ids->front()].emplace_back(std::move(*ids), assignment.labels[p]);
  }

  std::vector<Accumulator> acc(assignment.n_clusters);
  std::vector<std::size_t> last_dialogue(assignment.n_clusters, std::numeric_limits<std::size_t>::max());
  std::vector<int> touched;
  std::vector<std::uint8_t> sentence_past, sentence_senti;
  for (std::size_t d = 0; d < tokens.dialogues.size(); ++d) {
    const auto& td = tokens.dialogues[d];
    touched.clear();
    const double denom = td.n_utterances > 1 ? static_cast<double>(td.n_utterances - 1) : 1.0;
    for (const auto& utt : td.customer) {
      sentence_past.assign(utt.sentence_length.size(), 0);
      sentence_senti.assign(utt.sentence_length.size(), 0);
      for (std::size_t i = 0; i < utt.tokens.size(); ++i) {
        sentence_past[utt.sentence[i]] |= past[utt.tokens[i]] ? 1 : 0;
        sentence_senti[utt.sentence[i]] |= senti[utt.tokens[i]] ? 1 : 0;
      }
      const double rel = td.n_utterances > 1 ? static_cast<double>(utt.index) / denom : 0.0;
      for (std::size_t i = 0; i < utt.tokens.size(); ++i) {
        auto it = by_first.find(utt.tokens[i]);
        if (it == by_first.end()) continue;
        for (const auto& [ids, label] : it->second) {
          if (i + ids.size() > utt.tokens.size() ||
              !std::equal(ids.begin(), ids.end(), utt.tokens.begin() + static_cast<long>(i)))
            continue;
          auto& a = acc[static_cast<std::size_t>(label)];
          const auto s = utt.sentence[i];
          ++a.occurrences;
          a.position += rel;
          a.sentence_length += utt.sentence_length[s];
          a.past += sentence_past[s];
          a.sentiment += sentence_senti[s];
          if (last_dialogue[label] != d) {
            last_dialogue[label] = d;
            touched.push_back(label);
          }
        }
      }
    }
    const auto& offers = corpus.dialogues[d].offers;
    for (int label : touched) {
      auto& a = acc[static_cast<std::size_t>(label)];
      ++a.dialogues;
      a.offers += offers.size();
      for (const auto& o : offers) a.positive_offers += static_cast<std::size_t>(o.outcome);
    }
  }

  std::vector<ClusterStats> out(assignment.n_clusters);
  for (std::size_t p = 0; p < phrases.size(); ++p) {
    if (assignment.labels[p] == kNoise) continue;
    auto& s = out[static_cast<std::size_t>(assignment.labels[p])];
    ++s.size;
    if (s.sample_phrases.size() < 10) s.sample_phrases.push_back(phrases[p]);
  }
  for (std::size_t c = 0; c < out.size(); ++c) {
    auto& s = out[c];
    const auto& a = acc[c];
    s.cluster_id = static_cast<int>(c);
    s.n_occurrences = a.occurrences;
    s.n_dialogues = a.dialogues;
    if (a.offers) s.avg_propensity_rate = static_cast<double>(a.positive_offers) / static_cast<double>(a.offers);
    if (a.occurrences) {
      const double n = static_cast<double>(a.occurrences);
      s.avg_relative_position = a.position / n;
      s.avg_sentence_length = a.sentence_length / n;
      s.pct_past_tense = static_cast<double>(a.past) / n;
      s.pct_with_sentiment = static_cast<double>(a.sentiment) / n;
    }
  }
  return out;
}

ClusterStats cluster_stats(const std::vector<std::string>& cluster_phrases, const Corpus& corpus,
                           const TokenizedCorpus& tokens, const Lexicons& lexicons) {
  ClusterAssignment single;
  single.labels.assign(cluster_phrases.size(), 0);
  single.n_clusters = 1;
  return compute_cluster_stats(single, cluster_phrases, corpus, tokens, lexicons).front();
}

PruneResult prune_clusters(const std::vector<ClusterStats>& stats, const PruneThresholds& t,
                           double baseline_rate) {
  PruneResult out;
  for (const auto& s : stats) {
    PruneDecision d{s.cluster_id, true, {}};
    if (s.size < t.min_size) {
      d.kept = false;
      d.rule = "min_size";
    } else if (t.min_rate_deviation > 0.0 &&
               std::fabs(s.avg_propensity_rate - baseline_rate) < t.min_rate_deviation) {
      d.kept = false;
      d.rule = "min_rate_deviation";
    } else if (t.max_past_tense < 1.0 && s.pct_past_tense > t.max_past_tense) {
      d.kept = false;
      d.rule = "max_past_tense";
    }
    if (d.kept) out.kept.push_back(s.cluster_id);
    out.log.push_back(std::move(d));
  }
  return out;
}

double corpus_baseline_rate(const Corpus& corpus) {
  std::size_t n = 0, k = 0;
  for (const auto& d : corpus.dialogues)
    for (const auto& o : d.offers) {
      ++n;
      k += static_cast<std::size_t>(o.outcome);
    }
  return n ? static_cast<double>(k) / static_cast<double>(n) : 0.0;
}

namespace {

std::vector<std::string> split_tab(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    out.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

void write_cluster_report(const std::vector<ClusterReportRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw Error("unwritable", "cannot write " + path.string());
  out << "cluster_id\tsize\tavg_propensity_rate\tavg_relative_position\tavg_sentence_length\t"
         "pct_past_tense\tpct_with_sentiment\tn_occurrences\tn_dialogues\tkept\tprune_rule\tsample_phrases\n";
  for (const auto& r : rows) {
    const auto& s = r.stats;
    out << s.cluster_id << '\t' << s.size << '\t' << fmt(s.avg_propensity_rate) << '\t'
        << fmt(s.avg_relative_position) << '\t' << fmt(s.avg_sentence_length) << '\t' << fmt(s.pct_past_tense)
        << '\t' << fmt(s.pct_with_sentiment) << '\t' << s.n_occurrences << '\t' << s.n_dialogues << '\t'
        << (r.kept ? 1 : 0) << '\t' << r.prune_rule << '\t';
    for (std::size_t i = 0; i < s.sample_phrases.size(); ++i) out << (i ? " | " : "") << s.sample_phrases[i];
    out << '\n';
  }
}

std::vector<ClusterReportRow> read_cluster_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("unreadable", "cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<ClusterReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto c = split_tab(line);
    if (c.size() != 12) throw Error("malformed", "bad cluster report row: " + line);
    ClusterReportRow r;
    r.stats.cluster_id = std::stoi(c[0]);
    r.stats.size = std::stoull(c[1]);
    r.stats.avg_propensity_rate = std::stod(c[2]);
    r.stats.avg_relative_position = std::stod(c[3]);
    r.stats.avg_sentence_length = std::stod(c[4]);
    r.stats.pct_past_tense = std::stod(c[5]);
    r.stats.pct_with_sentiment = std::stod(c[6]);
    r.stats.n_occurrences = std::stoull(c[7]);
    r.stats.n_dialogues = std::stoull(c[8]);
    r.kept = c[9] == "1";
    r.prune_rule = c[10];
    std::size_t start = 0;
    const std::string& samples = c[11];
    while (!samples.empty()) {
      auto pos = samples.find(" | ", start);
      r.stats.sample_phrases.push_back(samples.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
      if (pos == std::string::npos) break;
      start = pos + 3;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_cluster_assignment(const ClusterAssignment& a, const std::vector<std::string>& phrases,
                              const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw Error("unwritable", "cannot write " + path.string());
  out << "# method=" << a.config.describe() << " n_clusters=" << a.n_clusters << '\n';
  for (std::size_t i = 0; i < phrases.size(); ++i) out << phrases[i] << '\t' << a.labels[i] << '\n';
}

std::pair<ClusterAssignment, std::vector<std::string>> read_cluster_assignment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("unreadable", "cannot read " + path.string());
  ClusterAssignment a;
  std::vector<std::string> phrases;
  std::string line;
  int max_label = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw Error("malformed", "bad assignment row: " + line);
    phrases.push_back(line.substr(0, tab));
    a.labels.push_back(std::stoi(line.substr(tab + 1)));
    max_label = std::max(max_label, a.labels.back());
  }
  a.n_clusters = static_cast<std::size_t>(max_label + 1);
  return {std::move(a), std::move(phrases)};
}

}  // namespace ltc
