#include "ltc/embedding.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "ltc/binary_io.hpp"
#include "ltc/hashing.hpp"
#include "ltc/text.hpp"

namespace ltc {

HashingEmbeddingProvider::HashingEmbeddingProvider(std::uint64_t seed, std::size_t dimension,
                                                   std::size_t buckets)
    : seed_(seed), dimension_(dimension), buckets_(buckets) {
  if (dimension == 0 || buckets == 0) throw Error("invalid_argument", "dimension and buckets must be > 0");
}

std::string HashingEmbeddingProvider::id() const {
  std::ostringstream os;
  os << "hashing-v1-s" << seed_ << "-d" << dimension_ << "-b" << buckets_;
  return os.str();
}

const std::vector<double>& HashingEmbeddingProvider::column(std::size_t bucket) {
  std::lock_guard lock(mu_);
  auto it = columns_.find(bucket);
  if (it != columns_.end()) return it->second;
  std::mt19937_64 rng(mix_seed(seed_, bucket));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> col(dimension_);
  for (auto& v : col) v = normal(rng);
  return columns_.emplace(bucket, std::move(col)).first->second;
}

std::vector<double> HashingEmbeddingProvider::embed_one(const std::string& phrase) {
  const auto words = tokenize_words(phrase);
  std::vector<std::string> features;
  for (std::size_t i = 0; i < words.size(); ++i) {
    features.push_back("u:" + words[i]);
    if (i + 1 < words.size()) features.push_back("b:" + words[i] + ' ' + words[i + 1]);
  }
  std::vector<double> out(dimension_, 0.0);
  for (const auto& f : features) {
    const std::uint64_t h = mix_seed(seed_, fnv1a64(f));
    const double sign = (h >> 63) ? -1.0 : 1.0;
    const auto& col = column(static_cast<std::size_t>(h % buckets_));
    for (std::size_t k = 0; k < dimension_; ++k) out[k] += sign * col[k];
  }
  double norm = 0.0;
  for (double v : out) norm += v * v;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (auto& v : out) v /= norm;
  }
  return out;
}

std::vector<std::vector<double>> HashingEmbeddingProvider::embed(const std::vector<std::string>& phrases) {
  std::vector<std::vector<double>> out;
  out.reserve(phrases.size());
  for (const auto& p : phrases) out.push_back(embed_one(p));
  return out;
}

EmbeddingCache::EmbeddingCache(std::filesystem::path dir, std::string provider_id)
    : dir_(std::move(dir)), provider_id_(std::move(provider_id)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path EmbeddingCache::path_for(const std::string& phrase) const {
  std::string key = provider_id_;
  key.push_back('\0');
  key += phrase;
  return dir_ / (sha256_hex(key) + ".f32");
}

std::optional<std::vector<double>> EmbeddingCache::get(const std::string& phrase) const {
  auto path = path_for(phrase);
  std::lock_guard lock(mu_);
  if (!std::filesystem::exists(path)) return std::nullopt;
  return read_f32_le(path);
}

void EmbeddingCache::put(const std::string& phrase, const std::vector<double>& vector) {
  auto path = path_for(phrase);
  std::lock_guard lock(mu_);
  auto tmp = path;
  tmp += ".tmp";
  write_f32_le(tmp, vector);
  std::filesystem::rename(tmp, path);
}

std::vector<PhraseVector> embed_phrases(const std::vector<std::string>& phrases,
                                        EmbeddingProvider& provider, EmbeddingCache* cache,
                                        std::size_t batch_size) {
  if (phrases.empty()) throw Error("invalid_argument", "no phrases to embed");
  if (batch_size == 0) batch_size = phrases.size();
  std::vector<PhraseVector> out(phrases.size());
  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < phrases.size(); ++i) {
    out[i].phrase = phrases[i];
    if (cache) {
      if (auto v = cache->get(phrases[i])) {
        out[i].vector = std::move(*v);
        continue;
      }
    }
    missing.push_back(i);
  }
  for (std::size_t start = 0; start < missing.size(); start += batch_size) {
    const std::size_t end = std::min(missing.size(), start + batch_size);
    std::vector<std::string> batch;
    for (std::size_t m = start; m < end; ++m) batch.push_back(phrases[missing[m]]);
    auto vectors = provider.embed(batch);
    if (vectors.size() != batch.size())
      throw Error("protocol", "provider returned " + std::to_string(vectors.size()) +
                                  " vectors for " + std::to_string(batch.size()) + " phrases");
    for (std::size_t m = start; m < end; ++m) {
      auto& v = vectors[m - start];
      // Round through float32 so cached and fresh vectors are identical.
      for (auto& x : v) x = static_cast<double>(static_cast<float>(x));
      if (cache) cache->put(phrases[missing[m]], v);
      out[missing[m]].vector = std::move(v);
    }
  }
  const std::size_t dim = out.front().vector.size();
  for (const auto& pv : out) {
    if (pv.vector.size() != dim)
      throw Error("dimension_mismatch", "embedding dimension mismatch for '" + pv.phrase + "'");
    for (double x : pv.vector)
      if (!std::isfinite(x)) throw Error("non_finite", "non-finite embedding for '" + pv.phrase + "'");
  }
  return out;
}

}  // namespace ltc
