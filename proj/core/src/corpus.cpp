#include "ltc/corpus.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace ltc {

using nlohmann::json;

std::string_view to_string(Speaker s) {
  return s == Speaker::kCustomer ? "customer" : "manager";
}

std::optional<Speaker> parse_speaker(std::string_view s) {
  if (s == "customer" || s == "client") return Speaker::kCustomer;
  if (s == "manager" || s == "agent") return Speaker::kManager;
  return std::nullopt;
}

std::size_t Dialogue::customer_line_count() const {
  return static_cast<std::size_t>(
      std::count_if(utterances.begin(), utterances.end(),
                    [](const Utterance& u) { return u.speaker == Speaker::kCustomer; }));
}

std::optional<int> Dialogue::outcome_for(std::string_view product) const {
  for (const auto& o : offers)
    if (o.product_id == product) return o.outcome;
  return std::nullopt;
}

namespace {

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

bool plausible_iso_date(std::string_view s) {
  if (s.size() < 10) return false;
  for (std::size_t i = 0; i < 10; ++i) {
    if (i == 4 || i == 7) {
      if (s[i] != '-') return false;
    } else if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
      return false;
    }
  }
  return true;
}

std::string id_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  return {};
}

// Returns an empty string on success, otherwise the rejection reason.
std::string parse_dialogue(const json& j, const std::set<ProductId>* catalog,
                           Dialogue& out) {
  if (!j.is_object()) return "record is not an object";
  out.dialogue_id = id_field(j, "dialogue_id");
  if (out.dialogue_id.empty()) return "missing dialogue_id";
  out.customer_id = id_field(j, "customer_id");
  if (out.customer_id.empty()) return "missing customer_id";

  if (auto ts = j.find("timestamp"); ts != j.end() && !ts->is_null()) {
    if (!ts->is_string() || !plausible_iso_date(ts->get<std::string>()))
      return "timestamp is not ISO-8601";
    out.timestamp = ts->get<std::string>();
  }

  auto utts = j.find("utterances");
  if (utts == j.end() || !utts->is_array()) return "missing utterances array";
  for (const auto& u : *utts) {
    if (!u.is_object() || !u.contains("speaker") || !u.contains("text") ||
        !u["speaker"].is_string() || !u["text"].is_string())
      return "utterance must have string speaker and text";
    auto speaker = parse_speaker(u["speaker"].get<std::string>());
    if (!speaker) return "unknown speaker '" + u["speaker"].get<std::string>() + "'";
    auto text = u["text"].get<std::string>();
    if (blank(text)) return "empty utterance text";
    out.utterances.push_back({*speaker, std::move(text), out.utterances.size()});
  }

  if (auto offers = j.find("offers"); offers != j.end() && !offers->is_null()) {
    if (!offers->is_array()) return "offers is not an array";
    for (const auto& o : *offers) {
      if (!o.is_object()) return "offer is not an object";
      std::string product = id_field(o, "product_id");
      if (product.empty()) return "offer missing product_id";
      auto oc = o.find("outcome");
      if (oc == o.end() || !(oc->is_number_integer() || oc->is_boolean()))
        return "offer outcome must be 0 or 1";
      int outcome = oc->is_boolean() ? (oc->get<bool>() ? 1 : 0) : oc->get<int>();
      if (outcome != 0 && outcome != 1) return "offer outcome must be 0 or 1";
      if (catalog && !catalog->count(product))
        return "product '" + product + "' not in catalog";
      out.offers.push_back({std::move(product), outcome});
    }
  }
  return {};
}

}  // namespace

CorpusFormat parse_corpus_format(std::string_view tag) {
  if (tag == "jsonl" || tag == "ndjson" || tag == "json-lines") return CorpusFormat::kJsonLines;
  throw Error("unknown_format", "unknown corpus format tag '" + std::string(tag) + "'");
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   const LoadOptions& options, LoadSummary* summary) {
  if (format != CorpusFormat::kJsonLines)
    throw Error("unknown_format", "unsupported corpus format");
  std::ifstream in(path);
  if (!in) throw Error("unreadable", "cannot read corpus file " + path.string());

  const auto rejects_path =
      options.rejects_path.empty() ? std::filesystem::path(path.string() + ".rejects.jsonl")
                                   : options.rejects_path;
  std::ofstream rejects;
  LoadSummary local;
  local.rejects_path = rejects_path;
  auto reject = [&](std::size_t line_no, const std::string& raw, const std::string& why) {
    if (!rejects.is_open()) {
      rejects.open(rejects_path, std::ios::trunc);
      if (!rejects) throw Error("unwritable", "cannot write rejects file " + rejects_path.string());
    }
    json r = {{"line", line_no}, {"reason", why}, {"raw", raw}};
    rejects << r.dump() << '\n';
    ++local.rejected;
  };

  Corpus corpus;
  std::optional<std::set<ProductId>> catalog;
  if (options.product_catalog) {
    corpus.product_catalog = *options.product_catalog;
    catalog.emplace(corpus.product_catalog.begin(), corpus.product_catalog.end());
  }

  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  bool first_record = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) {
      reject(line_no, line, "invalid JSON");
      first_record = false;
      continue;
    }
    if (first_record && j.is_object() && j.contains("product_catalog")) {
      first_record = false;
      if (!options.product_catalog) {
        for (const auto& p : j["product_catalog"]) corpus.product_catalog.push_back(p.get<std::string>());
        catalog.emplace(corpus.product_catalog.begin(), corpus.product_catalog.end());
      }
      continue;
    }
    first_record = false;

    Dialogue d;
    std::string why = parse_dialogue(j, catalog ? &*catalog : nullptr, d);
    if (!why.empty()) {
      reject(line_no, line, why);
      continue;
    }
    if (!seen_ids.insert(d.dialogue_id).second)
      throw Error("duplicate_id", "duplicate dialogue_id '" + d.dialogue_id + "' at line " +
                                      std::to_string(line_no));
    if (d.offers.size() > options.max_offers_per_dialogue) {
      ++local.over_offer_limit;
      std::cerr << "warning: dialogue " << d.dialogue_id << " has " << d.offers.size()
                << " offers (limit " << options.max_offers_per_dialogue << ")\n";
    }
    corpus.dialogues.push_back(std::move(d));
    ++local.accepted;
  }
  if (corpus.dialogues.empty())
    throw Error("empty_corpus", "no valid dialogues in " + path.string());

  if (!catalog) {
    std::set<ProductId> products;
    for (const auto& d : corpus.dialogues)
      for (const auto& o : d.offers) products.insert(o.product_id);
    corpus.product_catalog.assign(products.begin(), products.end());
  }
  if (summary) *summary = local;
  return corpus;
}

std::string serialize_dialogue(const Dialogue& d) {
  json j;
  j["dialogue_id"] = d.dialogue_id;
  j["customer_id"] = d.customer_id;
  j["timestamp"] = d.timestamp ? json(*d.timestamp) : json(nullptr);
  json utts = json::array();
  for (const auto& u : d.utterances)
    utts.push_back({{"speaker", std::string(to_string(u.speaker))}, {"text", u.text}});
  j["utterances"] = std::move(utts);
  json offers = json::array();
  for (const auto& o : d.offers) offers.push_back({{"product_id", o.product_id}, {"outcome", o.outcome}});
  j["offers"] = std::move(offers);
  return j.dump();
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw Error("unwritable", "cannot write corpus file " + path.string());
  out << json{{"product_catalog", corpus.product_catalog}}.dump() << '\n';
  for (const auto& d : corpus.dialogues) out << serialize_dialogue(d) << '\n';
}

std::string CleaningReport::to_key_value() const {
  std::ostringstream os;
  os << "input_size=" << input_size << '\n'
     << "output_size=" << output_size << '\n'
     << "dropped_too_short=" << dropped_too_short << '\n'
     << "dropped_contradictory=" << dropped_contradictory << '\n'
     << "merged_repeat_calls=" << merged_repeat_calls << '\n'
     << "dropped_conflicting_repeats=" << dropped_conflicting_repeats << '\n'
     << "offers_merged=" << offers_merged << '\n'
     << "offers_dropped_conflicting=" << offers_dropped_conflicting << '\n'
     << "duplicate_offers_collapsed=" << duplicate_offers_collapsed << '\n';
  return os.str();
}

CleaningReport CleaningReport::from_key_value(std::string_view text) {
  CleaningReport r;
  std::map<std::string, std::size_t*, std::less<>> fields = {
      {"input_size", &r.input_size},
      {"output_size", &r.output_size},
      {"dropped_too_short", &r.dropped_too_short},
      {"dropped_contradictory", &r.dropped_contradictory},
      {"merged_repeat_calls", &r.merged_repeat_calls},
      {"dropped_conflicting_repeats", &r.dropped_conflicting_repeats},
      {"offers_merged", &r.offers_merged},
      {"offers_dropped_conflicting", &r.offers_dropped_conflicting},
      {"duplicate_offers_collapsed", &r.duplicate_offers_collapsed}};
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto it = fields.find(line.substr(0, eq));
    if (it == fields.end()) continue;
    std::string_view value(line);
    value.remove_prefix(eq + 1);
    std::from_chars(value.data(), value.data() + value.size(), *it->second);
  }
  return r;
}

namespace {

// Chronological order used to pick the surviving call: timestamp first, then
// dialogue_id. Dialogues without a timestamp sort before dated ones.
bool called_before(const Dialogue& a, const Dialogue& b) {
  if (a.timestamp != b.timestamp) {
    if (!a.timestamp) return true;
    if (!b.timestamp) return false;
    return *a.timestamp < *b.timestamp;
  }
  return a.dialogue_id < b.dialogue_id;
}

}  // namespace

std::pair<Corpus, CleaningReport> clean_corpus(const Corpus& corpus,
                                               const CleaningOptions& options) {
  if (options.min_customer_lines < 1)
    throw Error("invalid_argument", "min_customer_lines must be >= 1");

  CleaningReport report;
  report.input_size = corpus.dialogues.size();

  std::vector<Dialogue> kept;
  kept.reserve(corpus.dialogues.size());
  for (const auto& d : corpus.dialogues) {
    if (d.customer_line_count() < options.min_customer_lines) {
      ++report.dropped_too_short;
      continue;
    }
    std::map<ProductId, int> outcomes;
    bool contradictory = false;
    Dialogue copy = d;
    copy.offers.clear();
    for (const auto& o : d.offers) {
      auto [it, inserted] = outcomes.emplace(o.product_id, o.outcome);
      if (inserted) {
        copy.offers.push_back(o);
      } else if (it->second != o.outcome) {
        contradictory = true;
      } else {
        ++report.duplicate_offers_collapsed;
      }
    }
    if (contradictory) {
      ++report.dropped_contradictory;
      continue;
    }
    kept.push_back(std::move(copy));
  }

  // Repeat calls: the same (customer, product) offered in several dialogues.
  std::map<std::pair<std::string, ProductId>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < kept.size(); ++i)
    for (const auto& o : kept[i].offers) groups[{kept[i].customer_id, o.product_id}].push_back(i);

  enum Loss : unsigned char { kNone = 0, kMerged = 1, kConflict = 2 };
  std::vector<unsigned char> loss(kept.size(), kNone);
  std::vector<std::set<ProductId>> remove(kept.size());
  std::vector<std::vector<std::size_t>> absorbed(kept.size());
  for (const auto& [key, members] : groups) {
    if (members.size() < 2) continue;
    const ProductId& product = key.second;
    auto first = *kept[members.front()].outcome_for(product);
    bool agree = std::all_of(members.begin(), members.end(), [&](std::size_t m) {
      return *kept[m].outcome_for(product) == first;
    });
    if (agree) {
      std::size_t latest = *std::max_element(members.begin(), members.end(),
                                             [&](std::size_t a, std::size_t b) {
                                               return called_before(kept[a], kept[b]);
                                             });
      for (std::size_t m : members) {
        if (m == latest) continue;
        remove[m].insert(product);
        loss[m] |= kMerged;
        absorbed[latest].push_back(m);
        ++report.offers_merged;
      }
    } else {
      for (std::size_t m : members) {
        remove[m].insert(product);
        loss[m] |= kConflict;
        ++report.offers_dropped_conflicting;
      }
    }
  }

  std::vector<bool> collapsed(kept.size(), false);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (remove[i].empty()) continue;
    auto& offers = kept[i].offers;
    std::erase_if(offers, [&](const OfferRecord& o) { return remove[i].count(o.product_id) > 0; });
    if (!offers.empty()) continue;
    collapsed[i] = true;
    if (loss[i] & kMerged)
      ++report.merged_repeat_calls;
    else
      ++report.dropped_conflicting_repeats;
  }

  Corpus out;
  out.product_catalog = corpus.product_catalog;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (collapsed[i]) continue;
    Dialogue d = std::move(kept[i]);
    if (options.concatenate_repeat_transcripts && !absorbed[i].empty()) {
      std::vector<std::size_t> earlier;
      for (std::size_t m : absorbed[i])
        if (collapsed[m]) earlier.push_back(m);
      std::sort(earlier.begin(), earlier.end(),
                [&](std::size_t a, std::size_t b) { return called_before(kept[a], kept[b]); });
      earlier.erase(std::unique(earlier.begin(), earlier.end()), earlier.end());
      std::vector<Utterance> merged;
      for (std::size_t m : earlier)
        for (const auto& u : kept[m].utterances) merged.push_back(u);
      for (auto& u : d.utterances) merged.push_back(std::move(u));
      for (std::size_t k = 0; k < merged.size(); ++k) merged[k].index = k;
      d.utterances = std::move(merged);
    }
    out.dialogues.push_back(std::move(d));
  }
  report.output_size = out.dialogues.size();
  return {std::move(out), report};
}

std::vector<ProductStats> corpus_stats(const Corpus& corpus) {
  std::vector<ProductStats> table;
  std::unordered_map<ProductId, std::size_t> index;
  for (const auto& p : corpus.product_catalog) {
    index.emplace(p, table.size());
    table.push_back({p, 0, std::nullopt});
  }
  std::vector<std::size_t> positives(table.size(), 0);
  for (const auto& d : corpus.dialogues) {
    for (const auto& o : d.offers) {
      auto it = index.find(o.product_id);
      if (it == index.end()) {
        it = index.emplace(o.product_id, table.size()).first;
        table.push_back({o.product_id, 0, std::nullopt});
        positives.push_back(0);
      }
      ++table[it->second].n_dialogues;
      positives[it->second] += static_cast<std::size_t>(o.outcome);
    }
  }
  for (std::size_t i = 0; i < table.size(); ++i)
    if (table[i].n_dialogues > 0)
      table[i].propensity_rate =
          static_cast<double>(positives[i]) / static_cast<double>(table[i].n_dialogues);
  return table;
}

std::string product_stats_to_tsv(const std::vector<ProductStats>& stats) {
  std::ostringstream os;
  os << "product\tn_dialogues\tpropensity_rate\n";
  for (const auto& s : stats) {
    os << s.product_id << '\t' << s.n_dialogues << '\t';
    if (s.propensity_rate) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", *s.propensity_rate);
      os << buf;
    } else {
      os << "null";
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace ltc
