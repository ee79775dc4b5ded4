#include "titlesim/cascade.h"

#include <map>

#include "titlesim/error.h"

namespace titlesim {

Cascade Cascade::build(const std::vector<LabeledRef>& refs, Strategy strategy,
                       const Resources& resources, double q,
                       std::size_t top_terms) {
  if (refs.empty()) throw Error("cannot build a cascade from zero references");
  std::vector<Document> docs;
  std::vector<std::string> labels;
  std::map<std::string, std::vector<LabeledRef>> groups;
  for (const auto& ref : refs) {
    if (!ref.coarse_label || ref.coarse_label->empty()) {
      throw Error("reference '" + ref.doc.id + "' has no coarse label");
    }
    if (ref.fine_label.empty()) {
      throw Error("reference '" + ref.doc.id + "' has an empty label");
    }
    docs.push_back(ref.doc);
    labels.push_back(*ref.coarse_label);
    groups[*ref.coarse_label].push_back(ref);
  }

  Cascade cascade;
  cascade.coarse = fit_cluster_model(docs, q, top_terms, labels);
  for (auto& [label, group] : groups) {
    try {
      auto index = KnnIndex::build(std::move(group), strategy, resources);
      for (const auto& w : index.warnings()) cascade.warnings.push_back(w);
      cascade.verticals.emplace(label, std::move(index));
    } catch (const Error& e) {
      cascade.warnings.push_back("dropped vertical '" + label + "': " + e.what());
    }
  }
  if (cascade.verticals.empty()) throw Error("no vertical index could be built");
  return cascade;
}

}  // namespace titlesim
