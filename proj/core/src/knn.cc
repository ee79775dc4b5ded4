#include "titlesim/knn.h"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "titlesim/coarse.h"
#include "titlesim/error.h"

namespace titlesim {
namespace {

bool closer(const Neighbor& a, const Neighbor& b) {
  if (a.dist != b.dist) return a.dist < b.dist;
  return a.ref_index < b.ref_index;
}

void check_k(std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be >= 1");
}

// Keeps `best` sorted by closer() and at most k long.
void offer(std::vector<Neighbor>& best, Neighbor candidate, std::size_t k) {
  if (best.size() == k && !closer(candidate, best.back())) return;
  best.insert(std::upper_bound(best.begin(), best.end(), candidate, closer),
              candidate);
  if (best.size() > k) best.pop_back();
}

}  // namespace

std::size_t default_prefetch(std::size_t k) {
  return std::max<std::size_t>(2 * k, 50);
}

KnnIndex KnnIndex::build(std::vector<LabeledRef> refs, Strategy strategy,
                         Resources resources) {
  if (refs.empty()) throw Error("cannot build an index from zero references");
  KnnIndex index;
  index.strategy_ = strategy;
  index.resources_ = std::move(resources);
  for (auto& ref : refs) {
    if (ref.fine_label.empty()) {
      throw Error("reference '" + ref.doc.id + "' has an empty label");
    }
    try {
      index.reps_.push_back(titlesim::represent(ref.doc, strategy, index.resources_));
    } catch (const UnrepresentableError& e) {
      index.warnings_.push_back("skipped reference '" + ref.doc.id + "': " + e.what());
      continue;
    }
    if (strategy == Strategy::kWmd) {
      auto dist = resolve(std::get<NBow>(index.reps_.back()), *index.table());
      index.centroids_.push_back(weighted_centroid(dist, *index.table()));
      index.word_dists_.push_back(std::move(dist));
    }
    index.refs_.push_back(std::move(ref));
  }
  if (index.refs_.empty()) {
    throw Error("no reference is representable under strategy '" +
                std::string(strategy_name(strategy)) + "'");
  }
  return index;
}

DocRepresentation KnnIndex::represent(const Document& doc) const {
  return titlesim::represent(doc, strategy_, resources_);
}

std::vector<Neighbor> KnnIndex::search(const DocRepresentation& query,
                                       std::size_t k) const {
  check_k(k);
  if (kind_of(query) != strategy_) {
    throw std::invalid_argument("query kind does not match the index strategy");
  }
  std::vector<Neighbor> all(refs_.size());
  if (strategy_ == Strategy::kWmd) {
    const auto q = resolve(std::get<NBow>(query), *table());
    for (std::size_t i = 0; i < refs_.size(); ++i) {
      all[i] = {i, wmd(q, word_dists_[i], *table())};
    }
  } else {
    for (std::size_t i = 0; i < refs_.size(); ++i) {
      all[i] = {i, distance(query, reps_[i], table())};
    }
  }
  const std::size_t keep = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep),
                    all.end(), closer);
  all.resize(keep);
  return all;
}

std::vector<Neighbor> KnnIndex::search_wmd_pruned(const NBow& query,
                                                  std::size_t k,
                                                  std::size_t prefetch,
                                                  PruneStats* stats) const {
  check_k(k);
  if (strategy_ != Strategy::kWmd) {
    throw std::invalid_argument("search_wmd_pruned requires a wmd index");
  }
  if (prefetch < k) throw std::invalid_argument("prefetch must be >= k");

  const auto q = resolve(query, *table());
  const auto q_centroid = weighted_centroid(q, *table());
  std::vector<Neighbor> bounds(refs_.size());
  for (std::size_t i = 0; i < refs_.size(); ++i) {
    bounds[i] = {i, euclidean_distance(q_centroid, centroids_[i])};
  }
  std::sort(bounds.begin(), bounds.end(), closer);

  std::vector<Neighbor> best;
  best.reserve(k + 1);
  PruneStats local;
  for (std::size_t pos = 0; pos < bounds.size(); ++pos) {
    if (pos >= prefetch && best.size() == k) {
      // WCD <= WMD holds exactly; the slack absorbs rounding in both so a
      // candidate tied with the k-th best is never dropped.
      const double kth = best.back().dist;
      if (bounds[pos].dist > kth + 1e-9 * (1.0 + kth)) {
        local.pruned = bounds.size() - pos;
        break;
      }
    }
    const std::size_t i = bounds[pos].ref_index;
    ++local.exact_evaluations;
    offer(best, {i, wmd(q, word_dists_[i], *table())}, k);
  }
  if (stats != nullptr) *stats = local;
  return best;
}

std::vector<Neighbor> KnnIndex::nearest(const DocRepresentation& query,
                                        std::size_t k,
                                        std::optional<std::size_t> prefetch) const {
  if (strategy_ == Strategy::kWmd && kind_of(query) == Strategy::kWmd) {
    return search_wmd_pruned(std::get<NBow>(query), k,
                             prefetch.value_or(default_prefetch(k)));
  }
  return search(query, k);
}

Prediction vote(const KnnIndex& index, std::span<const Neighbor> neighbors) {
  if (neighbors.empty()) throw std::invalid_argument("vote: no neighbors");
  Prediction pred;
  pred.neighbors.assign(neighbors.begin(), neighbors.end());
  std::map<std::string, double> summed;
  for (const auto& n : neighbors) {
    const auto& label = index.ref(n.ref_index).fine_label;
    ++pred.vote_counts[label];
    summed[label] += n.dist;
  }
  // Map iteration is lexicographic, so strict comparisons keep the smaller
  // label on a full tie.
  const std::string* winner = nullptr;
  std::size_t best_votes = 0;
  double best_sum = 0.0;
  for (const auto& [label, votes] : pred.vote_counts) {
    const double sum = summed[label];
    if (winner == nullptr || votes > best_votes ||
        (votes == best_votes && sum < best_sum)) {
      winner = &label;
      best_votes = votes;
      best_sum = sum;
    }
  }
  pred.label = *winner;
  return pred;
}

Prediction classify(const KnnIndex& index, const Document& query, std::size_t k,
                    std::optional<std::size_t> prefetch) {
  const auto rep = index.represent(query);
  const auto neighbors = index.nearest(rep, k, prefetch);
  return vote(index, neighbors);
}

Route route(const ClusterModel& coarse, const VerticalMap& verticals,
            const Document& query) {
  if (!coarse.stats) {
    throw std::invalid_argument("cluster model carries no corpus statistics");
  }
  const auto vec = tfidf(query, *coarse.stats);
  if (vec.is_zero()) {
    throw UnrepresentableError("query '" + query.id +
                               "' has an all-zero TF-IDF vector");
  }
  const auto& cluster = coarse.clusters.at(assign(vec, coarse));
  auto it = verticals.find(cluster.vertical);
  if (it == verticals.end()) {
    throw Error("no vertical index for coarse label '" + cluster.vertical + "'");
  }
  return {cluster.vertical, &it->second};
}

Prediction classify_cascade(const ClusterModel& coarse,
                            const VerticalMap& verticals, const Document& query,
                            std::size_t k, std::optional<std::size_t> prefetch) {
  const auto r = route(coarse, verticals, query);
  auto pred = classify(*r.index, query, k, prefetch);
  pred.vertical = r.vertical;
  return pred;
}

}  // namespace titlesim
