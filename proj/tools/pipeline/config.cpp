#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <sstream>

#include "ltc/common.hpp"

namespace ltc::cli {

namespace {

const std::vector<std::pair<std::string, std::string>>& default_entries() {
  static const std::vector<std::pair<std::string, std::string>> entries = {
      {"run.seed", "42"},
      {"run.store", ".ltc"},

      {"corpus.path", ""},
      {"corpus.format", "jsonl"},
      {"corpus.max_offers_per_dialogue", "3"},
      {"corpus.min_customer_lines", "2"},
      {"corpus.concatenate_repeats", "false"},

      {"phrasing.max_len", "4"},
      {"phrasing.drop_stop_phrases", "true"},
      {"phrasing.min_support", "50"},
      {"phrasing.alpha", "0.01"},
      {"phrasing.bonferroni", "false"},

      {"embedding.provider", "hashing"},
      {"embedding.dim", "768"},
      {"embedding.seed", "42"},
      {"embedding.remote_host", "127.0.0.1"},
      {"embedding.remote_port", "8088"},
      {"embedding.remote_path", "/embed"},
      {"embedding.cache", "true"},

      {"clustering.pca_components", "50"},
      {"clustering.method", "auto"},
      {"clustering.max_noise_fraction", "0.5"},
      {"clustering.eps", "0.5"},
      {"clustering.min_pts", "5"},
      {"clustering.linkage", "average"},
      {"clustering.n_clusters", "20"},

      {"stats.min_size", "2"},
      {"stats.min_rate_deviation", "0"},
      {"stats.max_past_tense", "1"},

      {"registry.roster", "expert1,expert2,expert3"},
      {"registry.votes", ""},
      {"registry.negation_cues", "not,no,never,n't"},
      {"registry.negation_window", "3"},
      {"registry.negated_clusters", "all"},

      {"features.customer_embeddings", ""},
      {"features.missing_embedding", "drop"},

      {"models.model", "gbdt"},
      {"models.product", ""},

      {"evaluation.products", ""},
      {"evaluation.criteria", "frequency,rate"},
      {"evaluation.q_list", "0,10,20,30,40,50,60,70,80,90,100"},
      {"evaluation.folds", "10"},
      {"evaluation.threshold", "0.5"},
      {"evaluation.rate_min_support", "20"},

      {"synth.n_dialogues", "50000"},
      {"synth.n_customers", "0"},
      {"synth.n_planted_variables", "200"},
      {"synth.zipf_exponent", "1.1"},
      {"synth.max_activation", "0.9"},
      {"synth.effect_min", "1.0"},
      {"synth.effect_max", "2.5"},
      {"synth.negation_rate", "0.1"},
      {"synth.embed_dim", "16"},

      {"curation.host", "127.0.0.1"},
      {"curation.port", "8765"},
      {"curation.static_dir", ""},
      {"curation.hide_stats", "false"},
  };
  return entries;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

}  // namespace

Config Config::defaults() {
  Config c;
  for (const auto& [k, v] : default_entries()) c.values_[k] = v;
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  Config c = defaults();
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error("config", "cannot parse config " + path.string() + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw Error("config", "config key outside a section: " + section);
    for (const auto& [key, value] : body) c.set(section + "." + key, value.data());
  }
  return c;
}

void Config::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error("config", "unknown config key: " + key);
  it->second = trim(value);
}

const std::string& Config::str(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error("config", "unknown config key: " + key);
  return it->second;
}

double Config::real(const std::string& key) const {
  const auto& s = str(key);
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error("config", key + ": expected a number, got '" + s + "'");
}

long long Config::integer(const std::string& key) const {
  const auto& s = str(key);
  try {
    std::size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error("config", key + ": expected an integer, got '" + s + "'");
}

std::size_t Config::size(const std::string& key) const {
  const long long v = integer(key);
  if (v < 0) throw Error("config", key + ": must be >= 0");
  return static_cast<std::size_t>(v);
}

bool Config::flag(const std::string& key) const {
  const auto& s = str(key);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw Error("config", key + ": expected true/false, got '" + s + "'");
}

std::vector<std::string> Config::list(const std::string& key) const {
  std::vector<std::string> out;
  std::stringstream in(str(key));
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> Config::reals(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : list(key)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error("config", key + ": expected numbers, got '" + item + "'");
    }
  }
  return out;
}

std::string Config::canonical(const std::vector<std::string>& sections) const {
  std::string out;
  for (const auto& [k, v] : values_) {
    const auto section = k.substr(0, k.find('.'));
    for (const auto& s : sections)
      if (s == section) {
        out += k + "=" + v + "\n";
        break;
      }
  }
  return out;
}

std::string Config::to_ini() const {
  std::string out, current;
  for (const auto& [k, v] : values_) {
    const auto dot = k.find('.');
    const auto section = k.substr(0, dot);
    if (section != current) {
      if (!current.empty()) out += "\n";
      out += "[" + section + "]\n";
      current = section;
    }
    out += k.substr(dot + 1) + " = " + v + "\n";
  }
  return out;
}

}  // namespace ltc::cli
