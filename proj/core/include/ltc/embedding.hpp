#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ltc/common.hpp"

namespace ltc {

inline constexpr std::size_t kDefaultEmbeddingDim = 768;

struct PhraseVector {
  std::string phrase;
  std::vector<double> vector;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  // Stable identifier; part of the on-disk cache key.
  virtual std::string id() const = 0;
  virtual std::size_t dimension() const = 0;
  // One vector per phrase, same order.
  virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& phrases) = 0;
};

// Feature hashing of word unigrams and bigrams into `buckets` signed slots,
// each slot owning a fixed Gaussian column (seeded by (seed, slot)), summed and
// L2-normalized. Pure function of (phrase text, seed, dimension).
class HashingEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit HashingEmbeddingProvider(std::uint64_t seed = 42, std::size_t dimension = kDefaultEmbeddingDim,
                                    std::size_t buckets = std::size_t{1} << 20);

  std::string id() const override;
  std::size_t dimension() const override { return dimension_; }
  std::vector<std::vector<double>> embed(const std::vector<std::string>& phrases) override;
  std::vector<double> embed_one(const std::string& phrase);

 private:
  const std::vector<double>& column(std::size_t bucket);

  std::uint64_t seed_;
  std::size_t dimension_;
  std::size_t buckets_;
  std::mutex mu_;
  std::unordered_map<std::size_t, std::vector<double>> columns_;
};

struct RemoteEmbeddingOptions {
  std::string host = "127.0.0.1";
  int port = 8088;
  std::string path = "/embed";
  std::chrono::milliseconds timeout{10000};
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{100};
  std::size_t expected_dimension = 0;  // 0 = accept whatever the server returns
};

// Speaks the embedding service protocol:
//   POST <path>   {"phrases": ["...", ...]}
//   200           {"vectors": [[f, ...], ...]}   (same order and count)
class RemoteEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit RemoteEmbeddingProvider(RemoteEmbeddingOptions options);

  std::string id() const override;
  std::size_t dimension() const override { return options_.expected_dimension; }
  std::vector<std::vector<double>> embed(const std::vector<std::string>& phrases) override;

 private:
  RemoteEmbeddingOptions options_;
};

// One file per (provider id, phrase): <dir>/<sha256>.f32 holding the raw
// little-endian float32 vector. Writes go through a temp file and rename.
class EmbeddingCache {
 public:
  EmbeddingCache(std::filesystem::path dir, std::string provider_id);

  std::optional<std::vector<double>> get(const std::string& phrase) const;
  void put(const std::string& phrase, const std::vector<double>& vector);
  std::filesystem::path path_for(const std::string& phrase) const;

 private:
  std::filesystem::path dir_;
  std::string provider_id_;
  mutable std::mutex mu_;
};

std::vector<PhraseVector> embed_phrases(const std::vector<std::string>& phrases,
                                        EmbeddingProvider& provider,
                                        EmbeddingCache* cache = nullptr,
                                        std::size_t batch_size = 256);

}  // namespace ltc
