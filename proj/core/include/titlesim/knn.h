#ifndef TITLESIM_KNN_H_
#define TITLESIM_KNN_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "titlesim/strategies.h"
#include "titlesim/text_model.h"
#include "titlesim/transport.h"

namespace titlesim {

struct ClusterModel;

inline constexpr std::size_t kDefaultK = 20;

// max(2k, 50)
std::size_t default_prefetch(std::size_t k);

struct LabeledRef {
  Document doc;
  std::string fine_label;
  std::optional<std::string> coarse_label;
};

struct Neighbor {
  std::size_t ref_index = 0;
  double dist = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct Prediction {
  std::string label;
  std::vector<Neighbor> neighbors;
  std::map<std::string, std::size_t> vote_counts;
  // Coarse label of the vertical searched; set by classify_cascade only.
  std::optional<std::string> vertical;
};

struct PruneStats {
  std::size_t exact_evaluations = 0;
  std::size_t pruned = 0;
};

// Immutable labeled reference collection with precomputed representations.
class KnnIndex {
 public:
  // References without a representation are skipped and recorded in
  // warnings(). Throws Error if none survive.
  static KnnIndex build(std::vector<LabeledRef> refs, Strategy strategy,
                        Resources resources);

  Strategy strategy() const { return strategy_; }
  std::size_t size() const { return refs_.size(); }
  const LabeledRef& ref(std::size_t i) const { return refs_[i]; }
  const DocRepresentation& rep(std::size_t i) const { return reps_[i]; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  const Resources& resources() const { return resources_; }

  DocRepresentation represent(const Document& doc) const;

  // Exhaustive scan. min(k, size()) neighbors ordered by (dist, ref_index).
  std::vector<Neighbor> search(const DocRepresentation& query,
                               std::size_t k) const;

  // Exact top-k under wmd using word centroid distance as a lower bound:
  // exact distances for the `prefetch` refs nearest by WCD, then a WCD-ordered
  // scan that stops once the bound exceeds the current k-th best. Same output
  // as search().
  std::vector<Neighbor> search_wmd_pruned(const NBow& query, std::size_t k,
                                          std::size_t prefetch,
                                          PruneStats* stats = nullptr) const;

  // search() for most kinds, search_wmd_pruned() with `prefetch` (or the
  // default) for wmd.
  std::vector<Neighbor> nearest(const DocRepresentation& query, std::size_t k,
                                std::optional<std::size_t> prefetch = {}) const;

 private:
  KnnIndex() = default;

  const EmbeddingTable* table() const { return resources_.embeddings.get(); }

  Strategy strategy_ = Strategy::kBowCosine;
  std::vector<LabeledRef> refs_;
  std::vector<DocRepresentation> reps_;
  Resources resources_;
  std::vector<std::string> warnings_;
  // kWmd only.
  std::vector<WordDistribution> word_dists_;
  std::vector<DenseVector> centroids_;
};

// Majority vote over `neighbors`; ties go to the smaller summed distance,
// then to the lexicographically smaller label.
Prediction vote(const KnnIndex& index, std::span<const Neighbor> neighbors);

Prediction classify(const KnnIndex& index, const Document& query, std::size_t k,
                    std::optional<std::size_t> prefetch = {});

using VerticalMap = std::map<std::string, KnnIndex>;

struct Route {
  std::string vertical;
  const KnnIndex* index = nullptr;
};

// Vertical chosen for `query` by the coarse model. Throws
// UnrepresentableError if the query has no TF-IDF mass and Error if the
// predicted coarse label has no vertical index.
Route route(const ClusterModel& coarse, const VerticalMap& verticals,
            const Document& query);

// Routes the query to a coarse cluster, then classifies inside that
// cluster's vertical only.
Prediction classify_cascade(const ClusterModel& coarse,
                            const VerticalMap& verticals, const Document& query,
                            std::size_t k,
                            std::optional<std::size_t> prefetch = {});

}  // namespace titlesim

#endif  // TITLESIM_KNN_H_
