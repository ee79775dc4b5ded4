#include "titlesim/strategies.h"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "titlesim/error.h"
#include "titlesim/transport.h"

namespace titlesim {
namespace {

template <typename T>
const T& require(const std::shared_ptr<const T>& ptr, const char* what) {
  if (!ptr) throw std::invalid_argument(std::string("strategy requires ") + what);
  return *ptr;
}

DenseVector require_nonzero(DenseVector v, const Document& doc) {
  if (l2_norm(v) == 0.0) {
    throw UnrepresentableError("document '" + doc.id + "' has a zero vector");
  }
  return v;
}

}  // namespace

std::string_view strategy_name(Strategy strategy) {
  switch (strategy) {
    case Strategy::kBowCosine:
      return "bow";
    case Strategy::kAvgW2V:
      return "avgw2v";
    case Strategy::kWmd:
      return "wmd";
    case Strategy::kDocVec:
      return "docvec";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (auto s : {Strategy::kBowCosine, Strategy::kAvgW2V, Strategy::kWmd,
                 Strategy::kDocVec}) {
    if (strategy_name(s) == name) return s;
  }
  throw std::invalid_argument("unknown strategy '" + std::string(name) +
                              "' (expected bow, avgw2v, wmd or docvec)");
}

Strategy kind_of(const DocRepresentation& rep) {
  return static_cast<Strategy>(rep.index());
}

DocRepresentation represent(const Document& doc, Strategy strategy,
                            const Resources& resources) {
  switch (strategy) {
    case Strategy::kBowCosine: {
      auto vec = tfidf(doc, require(resources.stats, "corpus statistics"));
      if (vec.is_zero()) {
        throw UnrepresentableError("document '" + doc.id +
                                   "' has an all-zero TF-IDF vector");
      }
      return vec;
    }
    case Strategy::kAvgW2V: {
      const auto& table = require(resources.embeddings, "embeddings");
      return Centroid{require_nonzero(centroid(doc.tokens, table), doc)};
    }
    case Strategy::kWmd: {
      const auto& table = require(resources.embeddings, "embeddings");
      NBow bag = nbow(doc);
      // Fails fast on all-OOV documents.
      resolve(bag, table);
      return bag;
    }
    case Strategy::kDocVec: {
      const auto& docvecs = require(resources.docvecs, "document vectors");
      auto row = docvecs.find(doc.id);
      if (!row) {
        throw UnrepresentableError("no document vector for '" + doc.id + "'");
      }
      auto v = docvecs.row(*row);
      return DocVector{require_nonzero(DenseVector(v.begin(), v.end()), doc)};
    }
  }
  throw std::invalid_argument("unknown strategy");
}

double distance(const DocRepresentation& a, const DocRepresentation& b,
                const EmbeddingTable* table) {
  if (a.index() != b.index()) {
    throw std::invalid_argument("distance: representation kinds differ");
  }
  const auto cosine_distance = [](double cos) { return std::max(0.0, 1.0 - cos); };
  switch (kind_of(a)) {
    case Strategy::kBowCosine:
      return cosine_distance(
          cosine_similarity(std::get<SparseVector>(a), std::get<SparseVector>(b)));
    case Strategy::kAvgW2V:
      return cosine_distance(cosine_similarity(std::get<Centroid>(a).values,
                                               std::get<Centroid>(b).values));
    case Strategy::kDocVec:
      return cosine_distance(cosine_similarity(std::get<DocVector>(a).values,
                                               std::get<DocVector>(b).values));
    case Strategy::kWmd:
      if (table == nullptr) throw std::invalid_argument("wmd distance requires embeddings");
      return wmd(std::get<NBow>(a), std::get<NBow>(b), *table);
  }
  throw std::invalid_argument("unknown representation kind");
}

}  // namespace titlesim
