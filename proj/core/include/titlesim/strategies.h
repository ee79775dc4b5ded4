#ifndef TITLESIM_STRATEGIES_H_
#define TITLESIM_STRATEGIES_H_

#include <memory>
#include <string_view>
#include <variant>

#include "titlesim/dense.h"
#include "titlesim/embeddings.h"
#include "titlesim/text_model.h"

namespace titlesim {

enum class Strategy { kBowCosine, kAvgW2V, kWmd, kDocVec };

// CLI tokens: bow, avgw2v, wmd, docvec.
std::string_view strategy_name(Strategy strategy);
// Throws std::invalid_argument for unknown names.
Strategy parse_strategy(std::string_view name);

struct Centroid {
  DenseVector values;
  friend bool operator==(const Centroid&, const Centroid&) = default;
};

struct DocVector {
  DenseVector values;
  friend bool operator==(const DocVector&, const DocVector&) = default;
};

// Alternative order matches Strategy.
using DocRepresentation = std::variant<SparseVector, Centroid, NBow, DocVector>;

Strategy kind_of(const DocRepresentation& rep);

// Shared, immutable inputs the strategies draw on. Only the members a given
// strategy needs have to be set.
struct Resources {
  std::shared_ptr<const CorpusStats> stats;
  std::shared_ptr<const EmbeddingTable> embeddings;
  std::shared_ptr<const DocVecTable> docvecs;
};

// Throws std::invalid_argument when a prerequisite is missing from
// `resources`, UnrepresentableError when the document has no usable
// representation (all-OOV, no doc vector, zero vector under a cosine kind).
DocRepresentation represent(const Document& doc, Strategy strategy,
                            const Resources& resources);

// Smaller is nearer: wmd for kWmd, 1 - cosine for every other kind.
double distance(const DocRepresentation& a, const DocRepresentation& b,
                const EmbeddingTable* table);

}  // namespace titlesim

#endif  // TITLESIM_STRATEGIES_H_
