#include "titlesim/eval.h"

#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "titlesim/error.h"

namespace titlesim {

Accuracy accuracy(std::span<const std::optional<std::string>> predictions,
                  std::span<const std::string> gold) {
  if (predictions.size() != gold.size()) {
    throw std::invalid_argument("accuracy: predictions and gold labels differ in length");
  }
  std::size_t correct = 0;
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (!predictions[i]) {
      ++skipped;
    } else if (*predictions[i] == gold[i]) {
      ++correct;
    }
  }
  const std::size_t scored = predictions.size() - skipped;
  if (scored == 0) return {0.0, skipped};
  return {static_cast<double>(correct) / static_cast<double>(scored), skipped};
}

std::optional<Retrieval> FlatRetriever::retrieve(const Document& query,
                                                 std::size_t k) const {
  DocRepresentation rep;
  try {
    rep = index_.represent(query);
  } catch (const UnrepresentableError&) {
    return std::nullopt;
  }
  return Retrieval{&index_, index_.nearest(rep, k, prefetch_), std::nullopt};
}

std::optional<Retrieval> CascadeRetriever::retrieve(const Document& query,
                                                    std::size_t k) const {
  Route r;
  DocRepresentation rep;
  try {
    r = route(cascade_.coarse, cascade_.verticals, query);
    rep = r.index->represent(query);
  } catch (const UnrepresentableError&) {
    return std::nullopt;
  }
  return Retrieval{r.index, r.index->nearest(rep, k, prefetch_), r.vertical};
}

SweepResult sweep_k(const Retriever& retriever, std::span<const EvalCase> cases,
                    std::size_t k_min, std::size_t k_max) {
  if (k_min == 0 || k_min > k_max) {
    throw std::invalid_argument("sweep_k requires 1 <= k_min <= k_max");
  }
  if (cases.empty()) throw Error("sweep_k: no evaluation cases");

  std::vector<std::optional<Retrieval>> retrieved;
  std::vector<std::string> gold;
  retrieved.reserve(cases.size());
  gold.reserve(cases.size());
  for (const auto& c : cases) {
    retrieved.push_back(retriever.retrieve(c.query, k_max));
    gold.push_back(c.gold_label);
  }

  SweepResult result;
  const std::string name(strategy_name(retriever.strategy()));
  std::vector<std::optional<std::string>> predictions(cases.size());
  for (std::size_t k = k_min; k <= k_max; ++k) {
    for (std::size_t i = 0; i < cases.size(); ++i) {
      const auto& r = retrieved[i];
      if (!r) {
        predictions[i].reset();
        continue;
      }
      const std::size_t keep = std::min(k, r->neighbors.size());
      predictions[i] = vote(*r->index, std::span(r->neighbors).first(keep)).label;
    }
    const auto acc = accuracy(predictions, gold);
    result.rows.push_back({name, k, acc.value, cases.size(), acc.n_skipped});
  }
  return result;
}

void export_csv(const SweepResult& result, std::ostream& out) {
  out << "strategy,k,accuracy,n_queries,n_skipped\n";
  char acc[64];
  for (const auto& row : result.rows) {
    std::snprintf(acc, sizeof(acc), "%.6f", row.accuracy);
    out << row.strategy << ',' << row.k << ',' << acc << ',' << row.n_queries
        << ',' << row.n_skipped << '\n';
  }
  out.flush();
  if (!out) throw Error("failed to write CSV output");
}

}  // namespace titlesim
