// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "cli.h"
#include "oracles.h"
#include "test_support.h"
#include "titlesim/cascade.h"
#include "titlesim/coarse.h"
#include "titlesim/eval.h"
#include "titlesim/knn.h"
#include "titlesim/transport.h"

namespace titlesim {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

std::vector<double> random_weights(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) total += (x = u(rng));
  for (auto& x : w) x /= total;
  return w;
}

Outcome transport_optimality() {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> size(1, 5);
  std::uniform_real_distribution<double> cost(0.0, 10.0);
  std::bernoulli_distribution zero(0.1);
  const auto start = Clock::now();
  int ok = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = size(rng), n = size(rng);
    const auto s = random_weights(m, rng);
    const auto d = random_weights(n, rng);
    Matrix c(m, n);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) c(i, j) = zero(rng) ? 0.0 : cost(rng);
    }
    const double got = solve_transport(s, d, c).objective;
    const double want = oracle::transport_optimum(s, d, c).objective;
    const double rel = want == 0.0 ? std::abs(got) : std::abs(got - want) / want;
    worst = std::max(worst, rel);
    if (rel <= 1e-8) ++ok;
  }
  const double elapsed = seconds_since(start);
  return {ok == 200 && elapsed < 10.0,
          format("%d/200 instances within 1e-8 relative (worst %.2e), %.2f s", ok,
                 worst, elapsed)};
}

Outcome wmd_metric_axioms() {
  std::mt19937_64 rng(20240602);
  const auto t = testing::random_table(50, 8, rng);
  double identity = 0.0, symmetry = 0.0, triangle = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = nbow(testing::random_doc(t, 1, 8, rng));
    const auto b = nbow(testing::random_doc(t, 1, 8, rng));
    const auto c = nbow(testing::random_doc(t, 1, 8, rng));
    const double ab = wmd(a, b, t);
    identity = std::max(identity, std::abs(wmd(a, a, t)));
    symmetry = std::max(symmetry, std::abs(ab - wmd(b, a, t)));
    triangle = std::max(triangle, wmd(a, c, t) - ab - wmd(b, c, t));
  }
  return {identity <= 1e-12 && symmetry <= 1e-9 && triangle <= 1e-9,
          format("300 triples: identity %.1e, symmetry gap %.1e, triangle excess %.1e",
                 identity, symmetry, triangle)};
}

Outcome wcd_lower_bound() {
  std::mt19937_64 rng(20240602);
  const auto t = testing::random_table(50, 8, rng);
  int ok = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = nbow(testing::random_doc(t, 1, 8, rng));
    const auto b = nbow(testing::random_doc(t, 1, 8, rng));
    const double excess = wcd(a, b, t) - wmd(a, b, t);
    worst = std::max(worst, excess);
    if (excess <= 1e-9) ++ok;
  }
  return {ok == 500, format("%d/500 pairs with wcd <= wmd + 1e-9 (max wcd - wmd %.2e)",
                            ok, worst)};
}

Outcome pruning_exactness() {
  std::mt19937_64 rng(20240604);
  auto table = std::make_shared<EmbeddingTable>(testing::random_table(300, 16, rng));
  std::vector<LabeledRef> refs;
  for (int i = 0; i < 1000; ++i) {
    refs.push_back(testing::labeled("r" + std::to_string(i),
                                    testing::random_doc(*table, 1, 10, rng).raw,
                                    "c" + std::to_string(i % 37)));
  }
  const auto index = KnnIndex::build(refs, Strategy::kWmd, Resources{.embeddings = table});
  int checks = 0, ok = 0;
  std::size_t exact = 0, pruned = 0;
  for (int q = 0; q < 100; ++q) {
    const auto rep = index.represent(testing::random_doc(*table, 1, 10, rng));
    const auto full = index.search(rep, 20);
    for (std::size_t k : {1u, 5u, 20u}) {
      const std::vector<Neighbor> expected(full.begin(), full.begin() + k);
      for (std::size_t prefetch : {k, 2 * k, std::size_t{50}}) {
        PruneStats stats;
        const auto got = index.search_wmd_pruned(std::get<NBow>(rep), k, prefetch, &stats);
        exact += stats.exact_evaluations;
        pruned += stats.pruned;
        bool same = got.size() == expected.size();
        for (std::size_t i = 0; same && i < got.size(); ++i) {
          same = got[i].ref_index == expected[i].ref_index && got[i].dist == expected[i].dist;
        }
        ++checks;
        if (same) ++ok;
      }
    }
  }
  return {ok == checks,
          format("%d/%d (query, k, prefetch) searches identical to exhaustive; "
                 "%.1f%% of wmd evaluations pruned",
                 ok, checks, 100.0 * static_cast<double>(pruned) /
                                 static_cast<double>(exact + pruned))};
}

Outcome worked_example() {
  auto table = std::make_shared<EmbeddingTable>(testing::worked_example_table());
  std::string detail;
  bool pass = true;
  for (Strategy s : {Strategy::kAvgW2V, Strategy::kWmd}) {
    const auto index =
        KnnIndex::build(testing::worked_example_refs(), s, Resources{.embeddings = table});
    const auto pred = classify(index, testing::worked_example_query(), 3);
    std::set<std::string> ids;
    for (const auto& n : pred.neighbors) ids.insert(index.ref(n.ref_index).doc.id);
    const bool ok = pred.label == "Java Developer" &&
                    ids == std::set<std::string>{"r1", "r2", "r3"};
    pass = pass && ok;
    detail += format("%s%s -> '%s'", detail.empty() ? "" : ", ",
                     std::string(strategy_name(s)).c_str(), pred.label.c_str());
  }
  return {pass, detail + " at k=3 with neighbors {r1, r2, r3}"};
}

std::string csv(const SweepResult& r) {
  std::ostringstream out;
  export_csv(r, out);
  return out.str();
}

Outcome synthetic_accuracy() {
  const auto set = testing::synthetic_set(20, 50, 10, 20240606);
  const Resources res{.embeddings = set.table};
  bool pass = true;
  std::string detail;
  for (Strategy s : {Strategy::kAvgW2V, Strategy::kWmd}) {
    const auto index = KnnIndex::build(set.refs, s, res);
    const auto first = sweep_k(FlatRetriever(index), set.queries, 1, 20);
    const auto again = sweep_k(FlatRetriever(index), set.queries, 1, 20);
    double worst = 1.0;
    for (const auto& row : first.rows) worst = std::min(worst, row.accuracy);
    const bool ok = first.rows.size() == 20 && csv(first) == csv(again) && worst >= 0.90;
    pass = pass && ok;
    detail += format("%s%s: %zu rows, min accuracy %.4f", detail.empty() ? "" : "; ",
                     std::string(strategy_name(s)).c_str(), first.rows.size(), worst);
  }
  return {pass, detail + " (20 classes x 50 refs, 200 queries)"};
}

Outcome latency() {
  std::mt19937_64 rng(20240607);
  auto table = std::make_shared<EmbeddingTable>(testing::random_table(2000, 50, rng));
  std::vector<LabeledRef> refs;
  std::vector<Document> docs;
  for (int i = 0; i < 10000; ++i) {
    refs.push_back(testing::labeled("r" + std::to_string(i),
                                    testing::random_doc(*table, 1, 10, rng).raw,
                                    "c" + std::to_string(i % 500)));
    docs.push_back(refs.back().doc);
  }
  std::vector<Document> queries;
  for (int i = 0; i < 20; ++i) queries.push_back(testing::random_doc(*table, 2, 8, rng));

  const auto worst_time = [&](const KnnIndex& index) {
    double worst = 0.0;
    for (const auto& q : queries) {
      const auto start = Clock::now();
      classify(index, q, kDefaultK);
      worst = std::max(worst, seconds_since(start));
    }
    return worst;
  };
  const auto bow = KnnIndex::build(
      refs, Strategy::kBowCosine,
      Resources{.stats = std::make_shared<CorpusStats>(build_corpus_stats(docs))});
  const auto wmd_index = KnnIndex::build(refs, Strategy::kWmd, Resources{.embeddings = table});
  const double bow_s = worst_time(bow);
  const double wmd_s = worst_time(wmd_index);
  return {bow_s < 0.1 && wmd_s < 1.0,
          format("10000 refs, slowest of 20 queries: bow %.1f ms, pruned wmd %.1f ms",
                 bow_s * 1e3, wmd_s * 1e3)};
}

Outcome svd_and_clusters() {
  std::mt19937_64 rng(20240608);
  std::normal_distribution<double> g;
  double worst = 0.0;
  int ok = 0;
  for (int trial = 0; trial < 50; ++trial) {
    TermDocMatrix m;
    m.values = Matrix(10, 8);
    for (std::size_t i = 0; i < 10; ++i) {
      m.terms.push_back("t" + std::to_string(i));
      for (std::size_t j = 0; j < 8; ++j) m.values(i, j) = g(rng);
    }
    const auto want = oracle::singular_values(m.values);
    const auto got = truncated_svd(m, 8).singular_values;
    bool same = got.size() == want.size();
    for (std::size_t k = 0; same && k < got.size(); ++k) {
      worst = std::max(worst, std::abs(got[k] - want[k]));
      same = std::abs(got[k] - want[k]) <= 1e-6;
    }
    if (same) ++ok;
  }

  const std::vector<std::vector<std::string>> vocab{
      {"java", "software", "developer", "engineer"},
      {"registered", "nurse", "clinical", "hospital"}};
  std::vector<Document> docs;
  for (std::size_t b = 0; b < 2; ++b) {
    auto words = vocab[b];
    for (int i = 0; i < 20; ++i) {
      std::shuffle(words.begin(), words.end(), rng);
      std::string raw = words[0] + " " + words[1] + " " + words[2] + " " + words[3];
      if (i % 5 == 0) raw += " " + words[0];
      docs.push_back(Document::from_raw("d", raw));
    }
  }
  const auto model = fit_cluster_model(docs, 0.9);
  return {ok == 50 && model.clusters.size() == 2,
          format("%d/50 random 10x8 spectra within 1e-6 (worst %.1e); "
                 "%zu clusters at q=0.9 on a two-vocabulary corpus",
                 ok, worst, model.clusters.size())};
}

std::string run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"titlesim"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return std::to_string(status) + "\n" + out.str();
}

Outcome cascade_containment() {
  const auto set = testing::synthetic_set(6, 20, 5, 20240609, 2);
  const Resources res{.embeddings = set.table};
  std::size_t checked = 0, contained = 0;
  for (Strategy s : {Strategy::kAvgW2V, Strategy::kWmd}) {
    const auto cascade = Cascade::build(set.refs, s, res, 0.9);
    for (const auto& c : set.queries) {
      const auto pred = cascade.classify(c.query, 5);
      const auto& index = cascade.verticals.at(*pred.vertical);
      bool inside = true;
      for (const auto& n : pred.neighbors) {
        inside = inside && index.ref(n.ref_index).coarse_label == pred.vertical;
      }
      ++checked;
      if (inside) ++contained;
    }
  }

  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "titlesim_acceptance";
  fs::create_directories(dir);
  const auto path = [&](const char* name) { return (dir / name).string(); };
  {
    std::ofstream emb(path("emb.txt"));
    save_vectors(*set.table, emb);
    std::ofstream refs(path("refs.tsv"));
    for (const auto& r : set.refs) {
      refs << r.doc.id << '\t' << r.doc.raw << '\t' << r.fine_label << '\t'
           << *r.coarse_label << '\n';
    }
    std::ofstream queries(path("queries.tsv"));
    for (const auto& c : set.queries) {
      queries << c.query.id << '\t' << c.query.raw << '\t' << c.gold_label << '\n';
    }
  }
  const std::vector<std::string> common{"--strategy", "wmd", "--refs", path("refs.tsv"),
                                        "--queries", path("queries.tsv"), "--embeddings",
                                        path("emb.txt"), "--cascade", "--q-threshold", "0.9"};
  auto classify_args = common;
  classify_args.insert(classify_args.begin(), "classify");
  auto sweep_args = common;
  sweep_args.insert(sweep_args.begin(), "sweep-k");
  const std::string a = run_cli(classify_args) + run_cli(sweep_args);
  const std::string b = run_cli(classify_args) + run_cli(sweep_args);
  fs::remove_all(dir);
  const bool identical = a == b && a.rfind("0\n", 0) == 0;
  return {contained == checked && identical,
          format("%zu/%zu cascade predictions with all neighbors in the assigned vertical; "
                 "repeated CLI runs %s",
                 contained, checked, identical ? "byte-identical" : "DIFFER")};
}

}  // namespace
}  // namespace titlesim

int main() {
  using titlesim::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"AC1 transport optimality", titlesim::transport_optimality},
      {"AC2 wmd metric axioms", titlesim::wmd_metric_axioms},
      {"AC3 wcd lower bound", titlesim::wcd_lower_bound},
      {"AC4 pruning exactness", titlesim::pruning_exactness},
      {"AC5 worked example", titlesim::worked_example},
      {"AC6 synthetic k sweep", titlesim::synthetic_accuracy},
      {"AC7 latency", titlesim::latency},
      {"AC8 svd oracle and clusters", titlesim::svd_and_clusters},
      {"AC9 cascade containment", titlesim::cascade_containment},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
