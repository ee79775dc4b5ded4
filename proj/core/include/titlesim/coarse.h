#ifndef TITLESIM_COARSE_H_
#define TITLESIM_COARSE_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "titlesim/dense.h"
#include "titlesim/text_model.h"

namespace titlesim {

inline constexpr double kDefaultRetention = 0.8;
inline constexpr std::size_t kDefaultTopTerms = 3;
// Singular values below this fraction of the largest are treated as zero.
inline constexpr double kRankTolerance = 1e-10;

// Term-document matrix: one row per term (sorted), one column per document.
struct TermDocMatrix {
  std::vector<std::string> terms;
  Matrix values;
};

TermDocMatrix term_document_matrix(std::span<const SparseVector> docs);

// Retained singular triples in non-increasing order of singular value.
// term_basis[c] is the c-th left singular vector (length = #terms), its first
// non-negligible coordinate positive. doc_coords[j][c] is the projection of
// document j onto term_basis[c].
struct SvdFactors {
  std::vector<std::string> terms;
  std::vector<double> singular_values;
  std::vector<DenseVector> term_basis;
  std::vector<DenseVector> doc_coords;
};

// One-sided Jacobi SVD, truncated to the top min(r_max, rank) triples.
SvdFactors truncated_svd(const TermDocMatrix& matrix, std::size_t r_max);

struct Cluster {
  std::string label;
  DenseVector basis_direction;
  std::size_t member_count = 0;
  // Coarse label queries assigned here are routed to. Defaults to `label`.
  std::string vertical;
};

struct ClusterModel {
  std::vector<Cluster> clusters;
  double q = kDefaultRetention;
  std::vector<std::string> terms;
  std::unordered_map<std::string, std::size_t> term_index;
  // Corpus the model was fitted on; needed to vectorize new queries.
  std::optional<CorpusStats> stats;
};

// Keeps the smallest r whose cumulative squared singular values reach a
// fraction q of the total; labels each direction with its top_terms heaviest
// terms.
ClusterModel discover_clusters(const SvdFactors& factors, double q,
                               std::size_t top_terms = kDefaultTopTerms);

// argmax over clusters of |cosine(doc_vec, direction)|, ties to the lower
// index. Throws Error on a zero vector.
std::size_t assign(const SparseVector& doc_vec, const ClusterModel& model);

// TF-IDF -> SVD -> clusters over `docs`. With `coarse_labels` (parallel to
// docs), each cluster's vertical becomes the label whose documents carry the
// most absolute cosine mass along the cluster direction.
ClusterModel fit_cluster_model(
    std::span<const Document> docs, double q,
    std::size_t top_terms = kDefaultTopTerms,
    std::span<const std::string> coarse_labels = {});

}  // namespace titlesim

#endif  // TITLESIM_COARSE_H_
