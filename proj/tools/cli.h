#ifndef TITLESIM_TOOLS_CLI_H_
#define TITLESIM_TOOLS_CLI_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "titlesim/coarse.h"
#include "titlesim/eval.h"
#include "titlesim/knn.h"
#include "titlesim/strategies.h"

namespace titlesim::cli {

enum class Command {
  kClassify,
  kEvaluate,
  kSweepK,
  kDiscoverTaxonomy,
  kEmbeddingsInfo,
};

struct RunConfig {
  Command command = Command::kClassify;
  Strategy strategy = Strategy::kAvgW2V;
  std::string refs_path;
  std::string queries_path;
  std::string embeddings_path;
  std::string docvecs_path;
  std::string out_path;
  std::size_t k = kDefaultK;
  std::size_t k_min = 1;
  std::size_t k_max = kDefaultK;
  std::optional<std::size_t> prefetch;
  bool cascade = false;
  double q_threshold = kDefaultRetention;
  std::size_t top_terms = kDefaultTopTerms;
};

// Bad flags or a config missing what the command needs. Exit status 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// `id \t title \t fine_label [\t coarse_label]` per line. Throws ParseError
// naming the line on a bad column count, empty id or label, or duplicate id.
std::vector<LabeledRef> load_refs(std::istream& in);

// `id \t title \t gold_label`. With require_gold false the gold column may be
// left off (gold_label is then empty).
std::vector<EvalCase> load_queries(std::istream& in, bool require_gold = true);

// Throws UsageError. `--help` is reported through the returned nullopt after
// the help text has been written to `out`.
std::optional<RunConfig> parse_args(int argc, const char* const* argv,
                                    std::ostream& out);

// Checks the cross-flag rules (required paths, k >= 1, prefetch >= k, q in
// (0, 1]). Throws UsageError.
void validate(const RunConfig& config);

// 0 on success, 1 on usage error, 2 on data error. Failures print one line
// to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// parse_args + run.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace titlesim::cli

#endif  // TITLESIM_TOOLS_CLI_H_
