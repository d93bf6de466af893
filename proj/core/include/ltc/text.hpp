#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ltc/corpus.hpp"

namespace ltc {

using TokenId = std::uint32_t;

// Unicode NFC followed by root-locale lowercasing.
std::string normalize_text(std::string_view utf8);

struct Tokens {
  std::vector<std::string> words;
  // Sentence ordinal of each word within the input (split on . ! ? and ellipsis).
  std::vector<std::uint32_t> sentence;
  std::uint32_t n_sentences = 0;
};

// Whitespace/punctuation split after normalize_text. Hyphens and apostrophes
// survive only between two word characters ("don't", "e-mail").
Tokens tokenize(std::string_view utf8);
std::vector<std::string> tokenize_words(std::string_view utf8);

std::string join_words(const std::vector<std::string>& words, std::string_view sep = " ");

bool is_stopword(std::string_view word);

class Vocabulary {
 public:
  TokenId intern(std::string_view word);
  std::optional<TokenId> find(std::string_view word) const;
  const std::string& word(TokenId id) const { return words_[id]; }
  std::size_t size() const { return words_.size(); }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };
  std::unordered_map<std::string, TokenId, Hash, std::equal_to<>> ids_;
  std::vector<std::string> words_;
};

struct TokenizedUtterance {
  std::size_t index = 0;  // position within the dialogue
  std::vector<TokenId> tokens;
  std::vector<std::uint32_t> sentence;
  std::vector<std::uint32_t> sentence_length;  // words per sentence
};

struct TokenizedDialogue {
  std::vector<TokenizedUtterance> customer;  // customer turns only
  std::size_t n_utterances = 0;
};

// Customer turns of every dialogue, interned against one vocabulary. Index i
// corresponds to corpus.dialogues[i].
struct TokenizedCorpus {
  std::shared_ptr<Vocabulary> vocab = std::make_shared<Vocabulary>();
  std::vector<TokenizedDialogue> dialogues;
};

TokenizedCorpus tokenize_corpus(const Corpus& corpus);

// Encodes a phrase string with an existing vocabulary; nullopt if any word is
// out of vocabulary (such a phrase cannot occur in the corpus).
std::optional<std::vector<TokenId>> encode_phrase(const Vocabulary& vocab, std::string_view phrase);

}  // namespace ltc
