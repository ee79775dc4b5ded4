#include "titlesim/text_model.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_set>

#include "titlesim/dense.h"
#include "titlesim/error.h"

namespace titlesim {
namespace {

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c >= 0x80;
}

char lower(unsigned char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a')
                                : static_cast<char>(c);
}

double lookup(const std::vector<std::pair<Token, double>>& entries,
              std::string_view token) {
  auto it = std::lower_bound(
      entries.begin(), entries.end(), token,
      [](const auto& entry, std::string_view t) { return entry.first < t; });
  return (it != entries.end() && it->first == token) ? it->second : 0.0;
}

}  // namespace

std::vector<Token> tokenize(std::string_view raw) {
  std::vector<Token> tokens;
  Token current;
  for (unsigned char c : raw) {
    if (is_word_byte(c)) {
      current.push_back(lower(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Document Document::from_raw(std::string id, std::string raw) {
  Document doc{std::move(id), std::move(raw), {}};
  doc.tokens = tokenize(doc.raw);
  return doc;
}

double NBow::weight(std::string_view token) const {
  return lookup(entries_, token);
}

NBow nbow(std::span<const Token> tokens) {
  if (tokens.empty()) throw UnrepresentableError("empty document");
  std::map<Token, std::size_t> counts;
  for (const auto& t : tokens) ++counts[t];
  const double length = static_cast<double>(tokens.size());
  std::vector<NBow::Entry> entries;
  entries.reserve(counts.size());
  for (const auto& [token, count] : counts) {
    entries.emplace_back(token, static_cast<double>(count) / length);
  }
  return NBow(std::move(entries));
}

NBow nbow(const Document& doc) { return nbow(doc.tokens); }

SparseVector SparseVector::from_entries(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  SparseVector out;
  for (auto& e : entries) {
    if (!out.entries_.empty() && out.entries_.back().first == e.first) {
      out.entries_.back().second += e.second;
    } else {
      out.entries_.push_back(std::move(e));
    }
  }
  std::erase_if(out.entries_, [](const Entry& e) { return e.second == 0.0; });
  return out;
}

double SparseVector::weight(std::string_view token) const {
  return lookup(entries_, token);
}

double SparseVector::norm() const {
  double sum = 0.0;
  for (const auto& [_, w] : entries_) sum += w * w;
  return std::sqrt(sum);
}

double dot(const SparseVector& a, const SparseVector& b) {
  const auto& x = a.entries();
  const auto& y = b.entries();
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    const int cmp = x[i].first.compare(y[j].first);
    if (cmp == 0) {
      sum += x[i++].second * y[j++].second;
    } else if (cmp < 0) {
      ++i;
    } else {
      ++j;
    }
  }
  return sum;
}

std::size_t CorpusStats::df(const Token& token) const {
  auto it = doc_freq.find(token);
  return it == doc_freq.end() ? 0 : it->second;
}

CorpusStats build_corpus_stats(std::span<const Document> docs) {
  if (docs.empty()) throw Error("cannot build corpus statistics from zero documents");
  CorpusStats stats;
  stats.doc_count = docs.size();
  for (const auto& doc : docs) {
    std::unordered_set<std::string_view> seen(doc.tokens.begin(), doc.tokens.end());
    for (auto token : seen) ++stats.doc_freq[Token(token)];
  }
  return stats;
}

SparseVector tfidf(const Document& doc, const CorpusStats& stats) {
  if (doc.tokens.empty()) throw UnrepresentableError("empty document");
  std::map<Token, std::size_t> counts;
  for (const auto& t : doc.tokens) ++counts[t];

  const double n = static_cast<double>(stats.doc_count);
  std::vector<SparseVector::Entry> entries;
  double sum_sq = 0.0;
  for (const auto& [token, count] : counts) {
    const std::size_t df = std::max<std::size_t>(stats.df(token), 1);
    const double w = static_cast<double>(count) * std::log(n / static_cast<double>(df));
    if (w == 0.0) continue;
    entries.emplace_back(token, w);
    sum_sq += w * w;
  }
  if (entries.empty()) return {};
  const double norm = std::sqrt(sum_sq);
  for (auto& e : entries) e.second /= norm;
  return SparseVector::from_entries(std::move(entries));
}

double cosine_similarity(const SparseVector& a, const SparseVector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw Error("zero vector");
  // Symmetric in a and b: the product of norms commutes and dot() walks both
  // sides in token order.
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("cosine_similarity: dimension mismatch");
  }
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) throw Error("zero vector");
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

}  // namespace titlesim
