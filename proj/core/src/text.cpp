#include "ltc/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/locid.h>
#include <unicode/unistr.h>

#include <array>
#include <unordered_set>

namespace ltc {

namespace {

bool is_ascii(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

bool word_char(UChar32 c) {
  return u_isalnum(c) || (U_GET_GC_MASK(c) & U_GC_M_MASK) != 0;
}

bool apostrophe(UChar32 c) { return c == '\'' || c == 0x2019 || c == 0x02BC; }
bool hyphen(UChar32 c) { return c == '-' || c == 0x2010 || c == 0x2011; }
bool sentence_end(UChar32 c) { return c == '.' || c == '!' || c == '?' || c == 0x2026; }

}  // namespace

std::string normalize_text(std::string_view utf8) {
  if (is_ascii(utf8)) {
    std::string out(utf8);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  }
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("icu", "NFC normalizer unavailable");
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), utf8.size()));
  icu::UnicodeString normalized = nfc->normalize(s, status);
  if (U_FAILURE(status)) throw Error("icu", "NFC normalization failed");
  normalized.toLower(icu::Locale::getRoot());
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

Tokens tokenize(std::string_view utf8) {
  const std::string norm = normalize_text(utf8);
  Tokens out;
  std::uint32_t sentence = 0;
  bool sentence_has_words = false;
  std::string current;

  auto flush = [&] {
    if (current.empty()) return;
    out.words.push_back(std::move(current));
    out.sentence.push_back(sentence);
    sentence_has_words = true;
    current.clear();
  };

  const auto* data = reinterpret_cast<const uint8_t*>(norm.data());
  const int32_t len = static_cast<int32_t>(norm.size());
  int32_t i = 0;
  UChar32 prev = 0;
  while (i < len) {
    int32_t start = i;
    UChar32 c;
    U8_NEXT(data, i, len, c);
    if (c < 0) {  // malformed byte sequence acts as a separator
      flush();
      prev = 0;
      continue;
    }
    if (word_char(c)) {
      current.append(norm, start, i - start);
    } else if ((apostrophe(c) || hyphen(c)) && !current.empty() && word_char(prev) && i < len) {
      int32_t peek = i;
      UChar32 next;
      U8_NEXT(data, peek, len, next);
      if (next >= 0 && word_char(next)) {
        current.push_back(apostrophe(c) ? '\'' : '-');
      } else {
        flush();
      }
    } else {
      flush();
      if (sentence_end(c) && sentence_has_words) {
        ++sentence;
        sentence_has_words = false;
      }
    }
    prev = c;
  }
  flush();
  out.n_sentences = out.words.empty() ? 0 : out.sentence.back() + 1;
  return out;
}

std::vector<std::string> tokenize_words(std::string_view utf8) { return tokenize(utf8).words; }

std::string join_words(const std::vector<std::string>& words, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out.append(sep);
    out.append(words[i]);
  }
  return out;
}

bool is_stopword(std::string_view word) {
  static const std::unordered_set<std::string_view> kStopwords = {
      "a",     "about", "after", "all",   "also",   "am",    "an",    "and",   "any",
      "are",   "as",    "at",    "be",    "been",   "but",   "by",    "can",   "could",
      "do",    "does",  "for",   "from",  "had",    "has",   "have",  "he",    "her",
      "here",  "him",   "his",   "how",   "i",      "if",    "in",    "into",  "is",
      "it",    "its",   "just",  "me",    "more",   "my",    "of",    "on",    "or",
      "our",   "out",   "over",  "she",   "so",     "some",  "than",  "that",  "the",
      "their", "them",  "then",  "there", "these",  "they",  "this",  "to",    "too",
      "up",    "us",    "very",  "was",   "we",     "well",  "were",  "what",  "when",
      "where", "which", "who",   "will",  "with",   "would", "yes",   "you",   "your",
      "ok",    "okay",  "yeah",  "uh",    "um",     "hello", "hi",    "thanks", "thank"};
  return kStopwords.count(word) > 0;
}

TokenId Vocabulary::intern(std::string_view word) {
  auto it = ids_.find(word);
  if (it != ids_.end()) return it->second;
  TokenId id = static_cast<TokenId>(words_.size());
  words_.emplace_back(word);
  ids_.emplace(words_.back(), id);
  return id;
}

std::optional<TokenId> Vocabulary::find(std::string_view word) const {
  auto it = ids_.find(word);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

TokenizedCorpus tokenize_corpus(const Corpus& corpus) {
  TokenizedCorpus out;
  out.dialogues.resize(corpus.dialogues.size());
  for (std::size_t d = 0; d < corpus.dialogues.size(); ++d) {
    const auto& dialogue = corpus.dialogues[d];
    auto& td = out.dialogues[d];
    td.n_utterances = dialogue.utterances.size();
    for (const auto& u : dialogue.utterances) {
      if (u.speaker != Speaker::kCustomer) continue;
      Tokens t = tokenize(u.text);
      TokenizedUtterance tu;
      tu.index = u.index;
      tu.tokens.reserve(t.words.size());
      for (const auto& w : t.words) tu.tokens.push_back(out.vocab->intern(w));
      tu.sentence = std::move(t.sentence);
      tu.sentence_length.assign(t.n_sentences, 0);
      for (auto s : tu.sentence) ++tu.sentence_length[s];
      td.customer.push_back(std::move(tu));
    }
  }
  return out;
}

std::optional<std::vector<TokenId>> encode_phrase(const Vocabulary& vocab, std::string_view phrase) {
  std::vector<TokenId> ids;
  for (const auto& w : tokenize_words(phrase)) {
    auto id = vocab.find(w);
    if (!id) return std::nullopt;
    ids.push_back(*id);
  }
  if (ids.empty()) return std::nullopt;
  return ids;
}

}  // namespace ltc
