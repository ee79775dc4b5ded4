#ifndef TITLESIM_TRANSPORT_H_
#define TITLESIM_TRANSPORT_H_

#include <cstddef>
#include <span>
#include <vector>

#include "titlesim/dense.h"
#include "titlesim/embeddings.h"
#include "titlesim/text_model.h"

namespace titlesim {

// Absolute tolerance on marginal sums.
inline constexpr double kMarginalTolerance = 1e-9;

struct DiscreteDistribution {
  std::vector<DenseVector> points;
  std::vector<double> weights;
};

struct TransportPlan {
  Matrix flows;
  double objective = 0.0;
};

// Pairwise Euclidean distances; throws std::invalid_argument on a dimension
// mismatch.
Matrix ground_cost_matrix(const DiscreteDistribution& src,
                          const DiscreteDistribution& dst);

// Exact solution of the balanced transportation problem
//
//   min sum_ij flow_ij * cost_ij
//   s.t. sum_j flow_ij = supplies_i, sum_i flow_ij = demands_j, flow >= 0
//
// by the transportation simplex (MODI potentials). The start basis is the
// northwest-corner staircase. Entering cells follow Dantzig's rule with
// lowest-index ties and switch permanently to Bland's rule after a run of
// degenerate pivots, so the method always terminates and is deterministic.
TransportPlan solve_transport(std::span<const double> supplies,
                              std::span<const double> demands,
                              const Matrix& costs);

// An NBow resolved against an embedding table: rows of the in-vocabulary
// tokens (token order) and their renormalized weights.
struct WordDistribution {
  std::vector<std::size_t> rows;
  std::vector<double> weights;
};

// Drops OOV tokens and renormalizes. Throws UnrepresentableError when nothing
// is left.
WordDistribution resolve(const NBow& doc, const EmbeddingTable& table);
DiscreteDistribution to_distribution(const WordDistribution& doc,
                                     const EmbeddingTable& table);
DenseVector weighted_centroid(const WordDistribution& doc,
                              const EmbeddingTable& table);

double wmd(const WordDistribution& a, const WordDistribution& b,
           const EmbeddingTable& table);
double wmd(const NBow& a, const NBow& b, const EmbeddingTable& table);

// Word centroid distance, a lower bound on wmd.
double wcd(const NBow& a, const NBow& b, const EmbeddingTable& table);

}  // namespace titlesim

#endif  // TITLESIM_TRANSPORT_H_
