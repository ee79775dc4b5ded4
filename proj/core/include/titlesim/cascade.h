#ifndef TITLESIM_CASCADE_H_
#define TITLESIM_CASCADE_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "titlesim/coarse.h"
#include "titlesim/knn.h"

namespace titlesim {

// Coarse cluster model over all reference titles plus one kNN index per
// coarse label.
struct Cascade {
  ClusterModel coarse;
  VerticalMap verticals;
  std::vector<std::string> warnings;

  // Every ref must carry a coarse label. Verticals whose refs are all
  // unrepresentable are dropped with a warning.
  static Cascade build(const std::vector<LabeledRef>& refs, Strategy strategy,
                       const Resources& resources,
                       double q = kDefaultRetention,
                       std::size_t top_terms = kDefaultTopTerms);

  Prediction classify(const Document& query, std::size_t k,
                      std::optional<std::size_t> prefetch = {}) const {
    return classify_cascade(coarse, verticals, query, k, prefetch);
  }
};

}  // namespace titlesim

#endif  // TITLESIM_CASCADE_H_
