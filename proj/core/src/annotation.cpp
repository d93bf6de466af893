#include "ltc/annotation.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include "ltc/text.hpp"

namespace ltc {

namespace {
constexpr std::uint32_t kUnknown = std::numeric_limits<std::uint32_t>::max();
}

Annotator::Annotator(const Registry& registry)
    : n_variables_(registry.size()), cues_(registry.negation.cues), window_(registry.negation.window) {
  for (const auto& v : registry.variables) {
    if (v.polarity != Polarity::kPositive) continue;
    for (const auto& phrase : v.phrases) {
      auto words = tokenize_words(phrase);
      if (words.empty()) continue;
      Pattern p;
      for (const auto& w : words) {
        auto [it, inserted] = words_.emplace(w, static_cast<std::uint32_t>(words_.size()));
        p.ids.push_back(it->second);
      }
      p.positive = static_cast<std::uint32_t>(v.variable_id);
      if (v.paired_variable) p.negated = static_cast<std::int64_t>(*v.paired_variable);
      by_first_[p.ids.front()].push_back(std::move(p));
    }
  }
}

std::vector<std::uint32_t> Annotator::encode(const std::vector<std::string>& words) const {
  std::vector<std::uint32_t> ids(words.size(), kUnknown);
  for (std::size_t i = 0; i < words.size(); ++i) {
    auto it = words_.find(words[i]);
    if (it != words_.end()) ids[i] = it->second;
  }
  return ids;
}

bool Annotator::is_cue(const std::string& word) const {
  for (const auto& c : cues_) {
    if (word == c) return true;
    if (c.find('\'') != std::string::npos && word.size() > c.size() &&
        word.compare(word.size() - c.size(), c.size(), c) == 0)
      return true;
  }
  return false;
}

std::vector<std::uint32_t> Annotator::active_variables(const Dialogue& d) const {
  std::vector<std::uint32_t> active;
  if (by_first_.empty()) return active;
  for (const auto& u : d.utterances) {
    if (u.speaker != Speaker::kCustomer) continue;
    auto words = tokenize_words(u.text);
    auto ids = encode(words);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] == kUnknown) continue;
      auto it = by_first_.find(ids[i]);
      if (it == by_first_.end()) continue;
      bool negated_checked = false, negated = false;
      for (const auto& p : it->second) {
        if (i + p.ids.size() > ids.size() ||
            !std::equal(p.ids.begin(), p.ids.end(), ids.begin() + static_cast<long>(i)))
          continue;
        if (!negated_checked) {
          negated_checked = true;
          for (std::size_t back = 1; back <= window_ && back <= i; ++back)
            if (is_cue(words[i - back])) {
              negated = true;
              break;
            }
        }
        if (!negated)
          active.push_back(p.positive);
        else if (p.negated >= 0)
          active.push_back(static_cast<std::uint32_t>(p.negated));
      }
    }
  }
  std::sort(active.begin(), active.end());
  active.erase(std::unique(active.begin(), active.end()), active.end());
  return active;
}

ContextVector Annotator::annotate(const Dialogue& d) const {
  ContextVector v{d.dialogue_id, std::vector<std::uint8_t>(n_variables_, 0)};
  for (auto id : active_variables(d)) v.values[id] = 1;
  return v;
}

ContextVector annotate_dialogue(const Dialogue& d, const Registry& registry) {
  return Annotator(registry).annotate(d);
}

ContextVector Annotations::dense(std::size_t i) const {
  ContextVector v{dialogue_ids.at(i), std::vector<std::uint8_t>(n_variables, 0)};
  for (auto id : active[i]) v.values[id] = 1;
  return v;
}

std::unordered_map<std::string, std::size_t> Annotations::index() const {
  std::unordered_map<std::string, std::size_t> out;
  out.reserve(dialogue_ids.size());
  for (std::size_t i = 0; i < dialogue_ids.size(); ++i) out.emplace(dialogue_ids[i], i);
  return out;
}

Annotations annotate_corpus(const Corpus& corpus, const Registry& registry) {
  Annotator annotator(registry);
  Annotations a;
  a.n_variables = registry.size();
  a.registry_hash = registry.hash();
  a.dialogue_ids.resize(corpus.dialogues.size());
  a.active.resize(corpus.dialogues.size());
  constexpr std::size_t kBlock = 256;
  const std::size_t n_blocks = (corpus.dialogues.size() + kBlock - 1) / kBlock;
  parallel_for(n_blocks, [&](std::size_t b) {
    const std::size_t end = std::min(corpus.dialogues.size(), (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      a.dialogue_ids[i] = corpus.dialogues[i].dialogue_id;
      a.active[i] = annotator.active_variables(corpus.dialogues[i]);
    }
  });
  return a;
}

void write_annotations(const Annotations& a, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw Error("unwritable", "cannot write " + path.string());
  out << "# registry_hash=" << a.registry_hash << " n_variables=" << a.n_variables << '\n';
  for (std::size_t i = 0; i < a.dialogue_ids.size(); ++i) {
    out << a.dialogue_ids[i] << '\t';
    for (std::size_t k = 0; k < a.active[i].size(); ++k) out << (k ? "," : "") << a.active[i][k];
    out << '\n';
  }
}

Annotations read_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("missing_artifact", "missing artifact: annotations (" + path.string() + ")");
  Annotations a;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw Error("malformed", "annotation file lacks header: " + path.string());
  std::istringstream header(line.substr(2));
  std::string kv;
  while (header >> kv) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) continue;
    auto key = kv.substr(0, eq), value = kv.substr(eq + 1);
    if (key == "registry_hash") a.registry_hash = value;
    if (key == "n_variables") a.n_variables = std::stoull(value);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw Error("malformed", "bad annotation row: " + line);
    a.dialogue_ids.push_back(line.substr(0, tab));
    std::vector<std::uint32_t> ids;
    std::size_t start = tab + 1;
    while (start < line.size()) {
      auto comma = line.find(',', start);
      if (comma == std::string::npos) comma = line.size();
      auto id = static_cast<std::uint32_t>(std::stoul(line.substr(start, comma - start)));
      if (id >= a.n_variables) throw Error("malformed", "variable id out of range: " + std::to_string(id));
      ids.push_back(id);
      start = comma + 1;
    }
    a.active.push_back(std::move(ids));
  }
  return a;
}

std::vector<std::pair<ProductId, double>> context_coverage(const Corpus& corpus, const Annotations& annotations) {
  auto idx = annotations.index();
  std::vector<std::pair<ProductId, double>> out;
  for (const auto& p : corpus.product_catalog) {
    std::size_t offered = 0, with_context = 0;
    for (const auto& d : corpus.dialogues) {
      if (!d.outcome_for(p)) continue;
      ++offered;
      auto it = idx.find(d.dialogue_id);
      if (it != idx.end() && !annotations.active[it->second].empty()) ++with_context;
    }
    out.emplace_back(p, offered ? static_cast<double>(with_context) / static_cast<double>(offered) : 0.0);
  }
  return out;
}

std::vector<std::pair<ProductId, double>> context_coverage(const Corpus& corpus, const Registry& registry) {
  return context_coverage(corpus, annotate_corpus(corpus, registry));
}

}  // namespace ltc
