#ifndef TITLESIM_TEXT_MODEL_H_
#define TITLESIM_TEXT_MODEL_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace titlesim {

using Token = std::string;

// Lowercases ASCII letters and splits on every byte that is neither an ASCII
// letter nor a digit. Bytes >= 0x80 count as letters so UTF-8 words survive.
std::vector<Token> tokenize(std::string_view raw);

struct Document {
  std::string id;
  std::string raw;
  std::vector<Token> tokens;

  static Document from_raw(std::string id, std::string raw);
};

// Normalized bag of words: each distinct token carries count / length.
// Entries are sorted by token.
class NBow {
 public:
  using Entry = std::pair<Token, double>;

  NBow() = default;
  explicit NBow(std::vector<Entry> sorted_entries)
      : entries_(std::move(sorted_entries)) {}

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }
  // 0 for tokens outside the support.
  double weight(std::string_view token) const;

  friend bool operator==(const NBow&, const NBow&) = default;

 private:
  std::vector<Entry> entries_;
};

NBow nbow(std::span<const Token> tokens);
NBow nbow(const Document& doc);

// Sparse real vector keyed by token. Entries are sorted by token and never
// hold an exact zero.
class SparseVector {
 public:
  using Entry = std::pair<Token, double>;

  SparseVector() = default;
  // Sorts, sums duplicates and drops zeros.
  static SparseVector from_entries(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  bool is_zero() const { return entries_.empty(); }
  double weight(std::string_view token) const;
  double norm() const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::vector<Entry> entries_;
};

double dot(const SparseVector& a, const SparseVector& b);

struct CorpusStats {
  std::size_t doc_count = 0;
  std::unordered_map<Token, std::size_t> doc_freq;

  // Document frequency, or 0 when the token was never seen.
  std::size_t df(const Token& token) const;
};

CorpusStats build_corpus_stats(std::span<const Document> docs);

// Raw-count TF times ln(N / df), L2-normalized. Tokens unseen by the corpus
// get df = 1. Returns the zero vector if every weight vanishes.
SparseVector tfidf(const Document& doc, const CorpusStats& stats);

double cosine_similarity(const SparseVector& a, const SparseVector& b);
double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace titlesim

#endif  // TITLESIM_TEXT_MODEL_H_
