#include "cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "titlesim/cascade.h"
#include "titlesim/embeddings.h"
#include "titlesim/error.h"

namespace titlesim::cli {
namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

// Calls `row(fields, line_no)` for each line; rejects empty and repeated ids.
void read_tsv(std::istream& in,
              const std::function<void(std::vector<std::string>&, std::size_t)>& row) {
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_tabs(line);
    row(fields, line_no);
    if (fields[0].empty()) throw ParseError(line_no, "empty id");
    if (!ids.insert(fields[0]).second) {
      throw ParseError(line_no, "duplicate id '" + fields[0] + "'");
    }
  }
  if (in.bad()) throw Error("read failure");
}

std::string fmt6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

const char* command_name(Command c) {
  switch (c) {
    case Command::kClassify: return "classify";
    case Command::kEvaluate: return "evaluate";
    case Command::kSweepK: return "sweep-k";
    case Command::kDiscoverTaxonomy: return "discover-taxonomy";
    case Command::kEmbeddingsInfo: return "embeddings-info";
  }
  return "?";
}

bool uses_strategy(Command c) {
  return c == Command::kClassify || c == Command::kEvaluate || c == Command::kSweepK;
}

// Opens `path` and applies `load`, prefixing any error with the path.
template <typename Load>
auto load_file(const std::string& path, Load load) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return load(in);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

// Primary output goes to --out when given, else to stdout.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : path_(path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw Error("cannot write '" + path + "'");
    }
    stream_ = path.empty() ? &fallback : &file_;
  }

  std::ostream& stream() { return *stream_; }

  void close() {
    stream_->flush();
    if (!*stream_) throw Error("failed writing '" + (path_.empty() ? "stdout" : path_) + "'");
  }

 private:
  std::string path_;
  std::ofstream file_;
  std::ostream* stream_;
};

void warn(std::ostream& err, const std::vector<std::string>& warnings) {
  if (warnings.empty()) return;
  err << "warning: " << warnings.size() << " reference(s) skipped; first: "
      << warnings.front() << '\n';
}

Resources load_resources(const RunConfig& config, const std::vector<LabeledRef>& refs) {
  Resources res;
  switch (config.strategy) {
    case Strategy::kBowCosine: {
      std::vector<Document> docs;
      docs.reserve(refs.size());
      for (const auto& r : refs) docs.push_back(r.doc);
      res.stats = std::make_shared<CorpusStats>(build_corpus_stats(docs));
      break;
    }
    case Strategy::kAvgW2V:
    case Strategy::kWmd:
      res.embeddings = std::make_shared<EmbeddingTable>(load_file(
          config.embeddings_path, [](std::istream& in) { return load_embeddings(in); }));
      break;
    case Strategy::kDocVec:
      res.docvecs = std::make_shared<DocVecTable>(load_file(
          config.docvecs_path, [](std::istream& in) { return load_docvecs(in); }));
      break;
  }
  return res;
}

// Flat index or cascade, whichever the config asks for.
struct Model {
  std::optional<KnnIndex> index;
  std::optional<Cascade> cascade;

  std::unique_ptr<Retriever> retriever(const RunConfig& config) const {
    if (cascade) {
      return std::make_unique<CascadeRetriever>(*cascade, config.strategy, config.prefetch);
    }
    return std::make_unique<FlatRetriever>(*index, config.prefetch);
  }

  Prediction classify(const Document& q, const RunConfig& config) const {
    if (cascade) return cascade->classify(q, config.k, config.prefetch);
    return titlesim::classify(*index, q, config.k, config.prefetch);
  }
};

Model build_model(const RunConfig& config, std::ostream& err) {
  auto refs = load_file(config.refs_path, [](std::istream& in) { return load_refs(in); });
  auto resources = load_resources(config, refs);
  Model model;
  try {
    if (config.cascade) {
      model.cascade = Cascade::build(refs, config.strategy, resources,
                                     config.q_threshold, config.top_terms);
      warn(err, model.cascade->warnings);
    } else {
      model.index = KnnIndex::build(std::move(refs), config.strategy, std::move(resources));
      warn(err, model.index->warnings());
    }
  } catch (const Error& e) {
    throw Error(config.refs_path + ": " + e.what());
  }
  return model;
}

std::vector<EvalCase> read_queries(const RunConfig& config, bool require_gold) {
  return load_file(config.queries_path, [require_gold](std::istream& in) {
    return load_queries(in, require_gold);
  });
}

void run_classify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto model = build_model(config, err);
  const auto queries = read_queries(config, false);
  Sink sink(config.out_path, out);
  std::size_t unclassified = 0;
  for (const auto& c : queries) {
    std::string label;
    try {
      label = model.classify(c.query, config).label;
    } catch (const UnrepresentableError&) {
      ++unclassified;
    }
    sink.stream() << c.query.id << '\t' << label << '\n';
  }
  sink.close();
  if (unclassified > 0) {
    err << "warning: " << unclassified << " query(ies) could not be represented\n";
  }
}

void run_evaluate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto model = build_model(config, err);
  const auto cases = read_queries(config, true);
  const auto result = sweep_k(*model.retriever(config), cases, config.k, config.k);
  const auto& row = result.rows.front();
  out << "accuracy=" << fmt6(row.accuracy) << " n_queries=" << row.n_queries
      << " n_skipped=" << row.n_skipped << '\n';
  if (!config.out_path.empty()) {
    Sink sink(config.out_path, out);
    export_csv(result, sink.stream());
    sink.close();
  }
}

void run_sweep(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto model = build_model(config, err);
  const auto cases = read_queries(config, true);
  const auto result = sweep_k(*model.retriever(config), cases, config.k_min, config.k_max);
  Sink sink(config.out_path, out);
  export_csv(result, sink.stream());
  sink.close();
}

void run_discover(const RunConfig& config, std::ostream& out) {
  const auto refs = load_file(config.refs_path, [](std::istream& in) { return load_refs(in); });
  std::vector<Document> docs;
  docs.reserve(refs.size());
  for (const auto& r : refs) docs.push_back(r.doc);
  ClusterModel model;
  try {
    model = fit_cluster_model(docs, config.q_threshold, config.top_terms);
  } catch (const Error& e) {
    throw Error(config.refs_path + ": " + e.what());
  }
  Sink sink(config.out_path, out);
  for (std::size_t i = 0; i < model.clusters.size(); ++i) {
    const auto& c = model.clusters[i];
    sink.stream() << i << '\t' << c.label << '\t' << c.member_count << '\n';
  }
  sink.close();
}

void run_info(const RunConfig& config, std::ostream& out) {
  const auto table = load_file(config.embeddings_path,
                               [](std::istream& in) { return load_embeddings(in); });
  Sink sink(config.out_path, out);
  sink.stream() << table.size() << ' ' << table.dim() << '\n';
  if (table.size() > 0) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < table.size(); ++i) {
      const double n = l2_norm(table.row(i));
      lo = std::min(lo, n);
      hi = std::max(hi, n);
      sum += n;
    }
    sink.stream() << "norm_min=" << fmt6(lo)
                  << " norm_mean=" << fmt6(sum / static_cast<double>(table.size()))
                  << " norm_max=" << fmt6(hi) << '\n';
  }
  sink.close();
}

}  // namespace

std::vector<LabeledRef> load_refs(std::istream& in) {
  std::vector<LabeledRef> refs;
  read_tsv(in, [&refs](std::vector<std::string>& f, std::size_t line) {
    if (f.size() != 3 && f.size() != 4) {
      throw ParseError(line, "expected 3 or 4 tab-separated fields, found " +
                                 std::to_string(f.size()));
    }
    if (f[2].empty()) throw ParseError(line, "empty fine label");
    std::optional<std::string> coarse;
    if (f.size() == 4) {
      if (f[3].empty()) throw ParseError(line, "empty coarse label");
      coarse = f[3];
    }
    refs.push_back({Document::from_raw(f[0], f[1]), f[2], std::move(coarse)});
  });
  return refs;
}

std::vector<EvalCase> load_queries(std::istream& in, bool require_gold) {
  std::vector<EvalCase> cases;
  read_tsv(in, [&](std::vector<std::string>& f, std::size_t line) {
    if (f.size() != 3 && (require_gold || f.size() != 2)) {
      throw ParseError(line, std::string(require_gold ? "expected 3" : "expected 2 or 3") +
                                 " tab-separated fields, found " +
                                 std::to_string(f.size()));
    }
    if (require_gold && f[2].empty()) throw ParseError(line, "empty gold label");
    cases.push_back({Document::from_raw(f[0], f[1]), f.size() == 3 ? f[2] : ""});
  });
  return cases;
}

std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out) {
  RunConfig config;
  std::string strategy;
  std::size_t prefetch = 0;

  CLI::App app{"Job title classification by semantic similarity", "titlesim"};
  app.require_subcommand(1);
  const std::vector<std::string> strategies{"bow", "avgw2v", "wmd", "docvec"};

  std::vector<std::pair<CLI::App*, Command>> subs;
  const auto sub = [&](Command c, const char* help) {
    auto* s = app.add_subcommand(command_name(c), help);
    subs.emplace_back(s, c);
    return s;
  };
  const auto add_model_flags = [&](CLI::App* s) {
    s->add_option("--strategy", strategy, "Similarity strategy")
        ->required()
        ->check(CLI::IsMember(strategies));
    s->add_option("--refs", config.refs_path, "Reference titles TSV")->required();
    s->add_option("--queries", config.queries_path, "Query titles TSV")->required();
    s->add_option("--embeddings", config.embeddings_path, "Word vectors (avgw2v, wmd)");
    s->add_option("--docvecs", config.docvecs_path, "Document vectors (docvec)");
    s->add_option("--prefetch", prefetch, "Exact WMD evaluations before pruning");
    s->add_flag("--cascade", config.cascade, "Route through the coarse cluster stage");
    s->add_option("--q-threshold", config.q_threshold, "Retained spectral energy");
    s->add_option("--top-terms", config.top_terms, "Terms per cluster label");
    s->add_option("--out", config.out_path, "Output path");
  };

  auto* classify = sub(Command::kClassify, "Print the predicted label of each query");
  add_model_flags(classify);
  classify->add_option("--k", config.k, "Neighbors per vote");

  auto* evaluate = sub(Command::kEvaluate, "Accuracy at a single k");
  add_model_flags(evaluate);
  evaluate->add_option("--k", config.k, "Neighbors per vote");

  auto* sweep = sub(Command::kSweepK, "Accuracy for every k in [k-min, k-max] as CSV");
  add_model_flags(sweep);
  sweep->add_option("--k-min", config.k_min, "Smallest k");
  sweep->add_option("--k-max", config.k_max, "Largest k");

  auto* discover = sub(Command::kDiscoverTaxonomy, "Cluster reference titles");
  discover->add_option("--refs", config.refs_path, "Reference titles TSV")->required();
  discover->add_option("--q-threshold", config.q_threshold, "Retained spectral energy");
  discover->add_option("--top-terms", config.top_terms, "Terms per cluster label");
  discover->add_option("--out", config.out_path, "Output path");

  auto* info = sub(Command::kEmbeddingsInfo, "Summarize a word vector file");
  info->add_option("--embeddings", config.embeddings_path, "Word vectors")->required();
  info->add_option("--out", config.out_path, "Output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    throw UsageError(msg);
  }

  for (const auto& [s, c] : subs) {
    if (s->parsed()) {
      config.command = c;
      if (uses_strategy(c)) {
        config.strategy = parse_strategy(strategy);
        if (s->get_option("--prefetch")->count() > 0) config.prefetch = prefetch;
      }
    }
  }
  validate(config);
  return config;
}

void validate(const RunConfig& config) {
  if (uses_strategy(config.command)) {
    if (config.refs_path.empty()) throw UsageError("--refs is required");
    if (config.queries_path.empty()) throw UsageError("--queries is required");
    const std::string name(strategy_name(config.strategy));
    if ((config.strategy == Strategy::kAvgW2V || config.strategy == Strategy::kWmd) &&
        config.embeddings_path.empty()) {
      throw UsageError("--embeddings is required for strategy '" + name + "'");
    }
    if (config.strategy == Strategy::kDocVec && config.docvecs_path.empty()) {
      throw UsageError("--docvecs is required for strategy '" + name + "'");
    }
    std::size_t largest_k = config.k;
    if (config.command == Command::kSweepK) {
      if (config.k_min < 1) throw UsageError("--k-min must be >= 1");
      if (config.k_min > config.k_max) throw UsageError("--k-min must not exceed --k-max");
      largest_k = config.k_max;
    } else if (config.k < 1) {
      throw UsageError("--k must be >= 1");
    }
    if (config.prefetch && *config.prefetch < largest_k) {
      throw UsageError("--prefetch must be >= " + std::to_string(largest_k));
    }
  }
  if (config.command == Command::kDiscoverTaxonomy && config.refs_path.empty()) {
    throw UsageError("--refs is required");
  }
  if (config.command == Command::kEmbeddingsInfo && config.embeddings_path.empty()) {
    throw UsageError("--embeddings is required");
  }
  if (!(config.q_threshold > 0.0 && config.q_threshold <= 1.0)) {
    throw UsageError("--q-threshold must lie in (0, 1]");
  }
  if (config.top_terms < 1) throw UsageError("--top-terms must be >= 1");
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate(config);
    switch (config.command) {
      case Command::kClassify: run_classify(config, out, err); break;
      case Command::kEvaluate: run_evaluate(config, out, err); break;
      case Command::kSweepK: run_sweep(config, out, err); break;
      case Command::kDiscoverTaxonomy: run_discover(config, out); break;
      case Command::kEmbeddingsInfo: run_info(config, out); break;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::optional<RunConfig> config;
  try {
    config = parse_args(argc, argv, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << " (see --help)\n";
    return 1;
  }
  if (!config) return 0;
  return run(*config, out, err);
}

}  // namespace titlesim::cli
