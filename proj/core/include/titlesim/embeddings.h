#ifndef TITLESIM_EMBEDDINGS_H_
#define TITLESIM_EMBEDDINGS_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "titlesim/dense.h"
#include "titlesim/text_model.h"

namespace titlesim {

// Fixed-dimension table of named dense vectors, in insertion order.
//
// Serialized as the plain-text word2vec interchange format: a `V D` header
// followed by V lines of `key v1 ... vD`, single-space separated.
class VectorTable {
 public:
  explicit VectorTable(std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return keys_.size(); }

  // Throws Error on a duplicate key, std::invalid_argument on a length
  // mismatch.
  void add(std::string key, std::span<const double> values);

  std::optional<std::size_t> find(std::string_view key) const;
  bool contains(std::string_view key) const { return find(key).has_value(); }
  const std::string& key(std::size_t row) const { return keys_[row]; }
  std::span<const double> row(std::size_t row) const {
    return {values_.data() + row * dim_, dim_};
  }
  // Throws Error when the key is absent.
  std::span<const double> at(std::string_view key) const;

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::size_t dim_;
  std::vector<std::string> keys_;
  std::vector<double> values_;
  std::unordered_map<std::string, std::size_t, Hash, std::equal_to<>> index_;
};

class EmbeddingTable : public VectorTable {
 public:
  using VectorTable::VectorTable;

  // Every vector multiplied by `factor`.
  EmbeddingTable scaled(double factor) const;
};

// Externally trained paragraph vectors keyed by document id.
class DocVecTable : public VectorTable {
 public:
  using VectorTable::VectorTable;
};

EmbeddingTable load_embeddings(std::istream& in);
DocVecTable load_docvecs(std::istream& in);
// Shortest round-trip decimal formatting.
void save_vectors(const VectorTable& table, std::ostream& out);

// Mean of the in-vocabulary token vectors, with multiplicity. Throws
// UnrepresentableError if no token is in the vocabulary.
DenseVector centroid(std::span<const Token> tokens, const EmbeddingTable& table);

struct WordScore {
  std::string word;
  double cosine;

  friend bool operator==(const WordScore&, const WordScore&) = default;
};

// Top-n words by cosine to `query`, descending, ties in lexicographic order.
std::vector<WordScore> nearest_words(std::span<const double> query,
                                     std::size_t n, const EmbeddingTable& table,
                                     const std::set<std::string>& exclude = {});

// "a is to b as c is to ?": nearest word to v(b) - v(a) + v(c), excluding
// the three inputs.
std::string analogy(std::string_view a, std::string_view b, std::string_view c,
                    const EmbeddingTable& table);

}  // namespace titlesim

#endif  // TITLESIM_EMBEDDINGS_H_
