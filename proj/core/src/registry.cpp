#include "ltc/registry.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ltc/hashing.hpp"

namespace ltc {

namespace {

std::string to_string(Decision d) { return d == Decision::kAccept ? "accept" : "reject"; }

Decision parse_decision(const std::string& s) {
  if (s == "accept" || s == "1") return Decision::kAccept;
  if (s == "reject" || s == "0") return Decision::kReject;
  throw Error("malformed", "unknown vote decision: " + s);
}

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

void write_vote_row(std::ostream& out, const ExpertVote& v) {
  out << v.expert_id << '\t' << v.cluster_id << '\t' << to_string(v.decision) << '\t' << v.timestamp << '\t'
      << v.note << '\n';
}

constexpr const char* kVotesHeader = "expert_id\tcluster_id\tdecision\ttimestamp\tnote\n";

}  // namespace

void VoteTable::record(const ExpertVote& vote) {
  auto key = std::make_pair(vote.expert_id, vote.cluster_id);
  auto it = votes_.find(key);
  if (it != votes_.end() && it->second.timestamp > vote.timestamp) return;
  votes_[key] = vote;
}

std::optional<Decision> VoteTable::decision(const std::string& expert, int cluster) const {
  auto it = votes_.find({expert, cluster});
  if (it == votes_.end()) return std::nullopt;
  return it->second.decision;
}

std::vector<ExpertVote> read_votes_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("missing_artifact", "cannot read votes file " + path.string());
  std::vector<ExpertVote> votes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto c = split_tab(line);
    if (line_no == 1 && c[0] == "expert_id") continue;
    if (c.size() < 3) throw Error("malformed", "votes line " + std::to_string(line_no) + ": expected at least 3 fields");
    ExpertVote v;
    v.expert_id = c[0];
    try {
      v.cluster_id = std::stoi(c[1]);
    } catch (const std::exception&) {
      throw Error("malformed", "votes line " + std::to_string(line_no) + ": bad cluster id '" + c[1] + "'");
    }
    v.decision = parse_decision(c[2]);
    if (c.size() > 3) v.timestamp = c[3];
    if (c.size() > 4) v.note = c[4];
    votes.push_back(std::move(v));
  }
  return votes;
}

void write_votes_file(const std::vector<ExpertVote>& votes, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw Error("unwritable", "cannot write " + path.string());
  out << kVotesHeader;
  for (const auto& v : votes) write_vote_row(out, v);
}

void append_vote(const ExpertVote& vote, const std::filesystem::path& path) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw Error("unwritable", "cannot append to " + path.string());
  if (fresh) out << kVotesHeader;
  write_vote_row(out, vote);
  out.flush();
}

VoteTable ingest_votes(const std::vector<ExpertVote>& votes, const std::vector<std::string>& roster,
                       const std::vector<int>& cluster_ids, CoverageReport* coverage) {
  std::set<std::string> experts(roster.begin(), roster.end());
  std::set<int> clusters(cluster_ids.begin(), cluster_ids.end());
  VoteTable table;
  for (const auto& v : votes) {
    if (!experts.count(v.expert_id)) throw Error("unknown_expert", "unknown expert: " + v.expert_id);
    if (!clusters.count(v.cluster_id))
      throw Error("unknown_cluster", "unknown cluster id: " + std::to_string(v.cluster_id));
    table.record(v);
  }
  if (coverage) *coverage = vote_coverage(table, roster, cluster_ids);
  return table;
}

CoverageReport vote_coverage(const VoteTable& table, const std::vector<std::string>& roster,
                             const std::vector<int>& cluster_ids) {
  CoverageReport r;
  std::vector<int> ids = cluster_ids;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  for (int c : ids) {
    bool complete = true;
    for (const auto& e : roster) {
      ++r.expected;
      if (table.decision(e, c)) {
        ++r.present;
      } else {
        r.missing.emplace_back(e, c);
        complete = false;
      }
    }
    if (!complete) r.uncovered_clusters.push_back(c);
  }
  return r;
}

std::vector<int> majority_select(const VoteTable& table, const std::vector<std::string>& roster,
                                 const std::vector<int>& cluster_ids) {
  std::vector<int> ids = cluster_ids;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<int> selected;
  for (int c : ids) {
    std::size_t accepts = 0;
    for (const auto& e : roster)
      if (table.decision(e, c) == Decision::kAccept) ++accepts;
    if (accepts > roster.size() - accepts) selected.push_back(c);
  }
  return selected;
}

namespace {

nlohmann::json to_json(const Registry& r) {
  nlohmann::json vars = nlohmann::json::array();
  for (const auto& v : r.variables) {
    nlohmann::json j;
    j["variable_id"] = v.variable_id;
    j["cluster_id"] = v.source_cluster_id;
    j["polarity"] = v.polarity == Polarity::kPositive ? "positive" : "negated";
    j["phrases"] = v.phrases;
    j["significant_products"] = v.significant_products;
    if (v.paired_variable) j["paired_variable"] = *v.paired_variable;
    vars.push_back(std::move(j));
  }
  nlohmann::json neg;
  neg["clusters"] = std::vector<int>(r.negation.negated_clusters.begin(), r.negation.negated_clusters.end());
  neg["cues"] = r.negation.cues;
  neg["window"] = r.negation.window;
  return {{"negation", neg}, {"variables", vars}};
}

}  // namespace

std::string Registry::canonical_json() const { return to_json(*this).dump(); }

std::string Registry::hash() const { return sha256_hex(canonical_json()); }

Registry build_registry(std::vector<SelectedCluster> clusters, const NegationConfig& negation) {
  std::sort(clusters.begin(), clusters.end(),
            [](const SelectedCluster& a, const SelectedCluster& b) { return a.cluster_id < b.cluster_id; });
  Registry r;
  r.negation = negation;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    auto& c = clusters[i];
    if (i > 0 && clusters[i - 1].cluster_id == c.cluster_id)
      throw Error("duplicate_id", "cluster selected twice: " + std::to_string(c.cluster_id));
    std::sort(c.phrases.begin(), c.phrases.end());
    c.phrases.erase(std::unique(c.phrases.begin(), c.phrases.end()), c.phrases.end());
    if (c.phrases.empty())
      throw Error("invalid_argument", "cluster " + std::to_string(c.cluster_id) + " has no phrases");
    std::sort(c.significant_products.begin(), c.significant_products.end());
    c.significant_products.erase(std::unique(c.significant_products.begin(), c.significant_products.end()),
                                 c.significant_products.end());
    ContextualVariable pos;
    pos.variable_id = r.variables.size();
    pos.source_cluster_id = c.cluster_id;
    pos.phrases = c.phrases;
    pos.significant_products = c.significant_products;
    if (negation.negated_clusters.count(c.cluster_id)) {
      ContextualVariable neg = pos;
      neg.variable_id = pos.variable_id + 1;
      neg.polarity = Polarity::kNegated;
      neg.paired_variable = pos.variable_id;
      pos.paired_variable = neg.variable_id;
      r.variables.push_back(std::move(pos));
      r.variables.push_back(std::move(neg));
    } else {
      r.variables.push_back(std::move(pos));
    }
  }
  return r;
}

void write_registry(const Registry& registry, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw Error("unwritable", "cannot write " + path.string());
  out << to_json(registry).dump(2) << '\n';
}

Registry read_registry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("missing_artifact", "missing artifact: registry (" + path.string() + ")");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed", "registry is not valid JSON: " + std::string(e.what()));
  }
  Registry r;
  const auto& neg = j.at("negation");
  for (int c : neg.at("clusters")) r.negation.negated_clusters.insert(c);
  r.negation.cues = neg.at("cues").get<std::vector<std::string>>();
  r.negation.window = neg.at("window").get<std::size_t>();
  for (const auto& v : j.at("variables")) {
    ContextualVariable cv;
    cv.variable_id = v.at("variable_id").get<std::size_t>();
    cv.source_cluster_id = v.at("cluster_id").get<int>();
    cv.polarity = v.at("polarity").get<std::string>() == "negated" ? Polarity::kNegated : Polarity::kPositive;
    cv.phrases = v.at("phrases").get<std::vector<std::string>>();
    cv.significant_products = v.at("significant_products").get<std::vector<std::string>>();
    if (v.contains("paired_variable")) cv.paired_variable = v.at("paired_variable").get<std::size_t>();
    if (cv.variable_id != r.variables.size())
      throw Error("malformed", "registry variable ids must be dense and ordered");
    r.variables.push_back(std::move(cv));
  }
  return r;
}

}  // namespace ltc
