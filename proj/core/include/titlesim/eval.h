#ifndef TITLESIM_EVAL_H_
#define TITLESIM_EVAL_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "titlesim/cascade.h"
#include "titlesim/knn.h"

namespace titlesim {

struct EvalCase {
  Document query;
  std::string gold_label;
};

struct SweepRow {
  std::string strategy;
  std::size_t k = 0;
  double accuracy = 0.0;
  std::size_t n_queries = 0;
  std::size_t n_skipped = 0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

struct Accuracy {
  double value = 0.0;
  std::size_t n_skipped = 0;
};

// nullopt predictions are unrepresentable queries: excluded from the
// denominator and counted in n_skipped.
Accuracy accuracy(std::span<const std::optional<std::string>> predictions,
                  std::span<const std::string> gold);

// Neighbors of one query together with the index they refer to.
struct Retrieval {
  const KnnIndex* index = nullptr;
  std::vector<Neighbor> neighbors;
  std::optional<std::string> vertical;
};

class Retriever {
 public:
  virtual ~Retriever() = default;
  // nullopt when the query cannot be represented.
  virtual std::optional<Retrieval> retrieve(const Document& query,
                                            std::size_t k) const = 0;
  virtual Strategy strategy() const = 0;
};

class FlatRetriever : public Retriever {
 public:
  explicit FlatRetriever(const KnnIndex& index,
                         std::optional<std::size_t> prefetch = {})
      : index_(index), prefetch_(prefetch) {}

  std::optional<Retrieval> retrieve(const Document& query,
                                    std::size_t k) const override;
  Strategy strategy() const override { return index_.strategy(); }

 private:
  const KnnIndex& index_;
  std::optional<std::size_t> prefetch_;
};

class CascadeRetriever : public Retriever {
 public:
  CascadeRetriever(const Cascade& cascade, Strategy strategy,
                   std::optional<std::size_t> prefetch = {})
      : cascade_(cascade), strategy_(strategy), prefetch_(prefetch) {}

  std::optional<Retrieval> retrieve(const Document& query,
                                    std::size_t k) const override;
  Strategy strategy() const override { return strategy_; }

 private:
  const Cascade& cascade_;
  Strategy strategy_;
  std::optional<std::size_t> prefetch_;
};

// One row per k in [k_min, k_max]. Each query is searched once at k_max and
// its neighbor list truncated for the smaller k.
SweepResult sweep_k(const Retriever& retriever, std::span<const EvalCase> cases,
                    std::size_t k_min, std::size_t k_max);

// Header `strategy,k,accuracy,n_queries,n_skipped`, accuracy with six
// decimals, '\n' line ends. Throws Error if the stream fails.
void export_csv(const SweepResult& result, std::ostream& out);

}  // namespace titlesim

#endif  // TITLESIM_EVAL_H_
