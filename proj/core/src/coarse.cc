#include "titlesim/coarse.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "titlesim/error.h"

namespace titlesim {
namespace {

constexpr double kOrthogonalityTolerance = 1e-15;
constexpr int kMaxSweeps = 80;

// Hestenes one-sided Jacobi: rotates pairs of columns of `cols` until they
// are mutually orthogonal, accumulating the rotations into `basis`
// (initially the identity).
void orthogonalize_columns(std::vector<DenseVector>& cols,
                           std::vector<DenseVector>& basis) {
  const std::size_t n = cols.size();
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = dot(cols[p], cols[p]);
        const double beta = dot(cols[q], cols[q]);
        const double gamma = dot(cols[p], cols[q]);
        if (alpha == 0.0 || beta == 0.0 ||
            std::abs(gamma) <= kOrthogonalityTolerance * std::sqrt(alpha * beta)) {
          continue;
        }
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        const auto rotate = [c, s](DenseVector& x, DenseVector& y) {
          for (std::size_t i = 0; i < x.size(); ++i) {
            const double xi = x[i];
            const double yi = y[i];
            x[i] = c * xi - s * yi;
            y[i] = s * xi + c * yi;
          }
        };
        rotate(cols[p], cols[q]);
        rotate(basis[p], basis[q]);
      }
    }
    if (!rotated) return;
  }
}

std::vector<DenseVector> identity_columns(std::size_t n) {
  std::vector<DenseVector> id(n, DenseVector(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) id[i][i] = 1.0;
  return id;
}

std::string top_terms_label(const DenseVector& direction,
                            const std::vector<std::string>& terms,
                            std::size_t top_terms) {
  std::vector<std::size_t> order(direction.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double wa = std::abs(direction[a]);
    const double wb = std::abs(direction[b]);
    if (wa != wb) return wa > wb;
    return terms[a] < terms[b];
  });
  std::string label;
  for (std::size_t k = 0; k < std::min(top_terms, order.size()); ++k) {
    if (direction[order[k]] == 0.0) break;
    if (!label.empty()) label.push_back(' ');
    label += terms[order[k]];
  }
  return label;
}

// Projection of a sparse vector on a dense term-space direction.
double project(const SparseVector& vec, const DenseVector& direction,
               const std::unordered_map<std::string, std::size_t>& term_index) {
  double sum = 0.0;
  for (const auto& [token, w] : vec.entries()) {
    auto it = term_index.find(token);
    if (it != term_index.end()) sum += w * direction[it->second];
  }
  return sum;
}

std::size_t argmax_abs(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (std::abs(scores[c]) > std::abs(scores[best])) best = c;
  }
  return best;
}

}  // namespace

TermDocMatrix term_document_matrix(std::span<const SparseVector> docs) {
  std::set<std::string> vocab;
  for (const auto& d : docs) {
    for (const auto& [token, _] : d.entries()) vocab.insert(token);
  }
  TermDocMatrix out;
  out.terms.assign(vocab.begin(), vocab.end());
  out.values = Matrix(out.terms.size(), docs.size());
  for (std::size_t j = 0; j < docs.size(); ++j) {
    for (const auto& [token, w] : docs[j].entries()) {
      const auto row = std::lower_bound(out.terms.begin(), out.terms.end(), token) -
                       out.terms.begin();
      out.values(static_cast<std::size_t>(row), j) = w;
    }
  }
  return out;
}

SvdFactors truncated_svd(const TermDocMatrix& matrix, std::size_t r_max) {
  const Matrix& a = matrix.values;
  if (a.empty()) throw Error("cannot decompose an empty matrix");
  if (r_max == 0) throw std::invalid_argument("r_max must be >= 1");
  if (matrix.terms.size() != a.rows()) {
    throw std::invalid_argument("term list does not match the matrix rows");
  }
  const std::size_t n_terms = a.rows();
  const std::size_t n_docs = a.cols();

  // Orthogonalize whichever side has fewer columns: documents when
  // n_docs <= n_terms, otherwise terms (working on the transpose).
  const bool transposed = n_docs > n_terms;
  const std::size_t n_cols = transposed ? n_terms : n_docs;
  const std::size_t len = transposed ? n_docs : n_terms;
  std::vector<DenseVector> cols(n_cols, DenseVector(len));
  for (std::size_t i = 0; i < n_terms; ++i) {
    for (std::size_t j = 0; j < n_docs; ++j) {
      if (transposed) {
        cols[i][j] = a(i, j);
      } else {
        cols[j][i] = a(i, j);
      }
    }
  }
  auto basis = identity_columns(n_cols);
  orthogonalize_columns(cols, basis);

  std::vector<double> sigma(n_cols);
  for (std::size_t k = 0; k < n_cols; ++k) sigma[k] = l2_norm(cols[k]);
  std::vector<std::size_t> order(n_cols);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  SvdFactors out;
  out.terms = matrix.terms;
  out.doc_coords.assign(n_docs, {});
  const double largest = sigma[order.front()];
  if (largest == 0.0) return out;

  for (std::size_t k : order) {
    if (out.singular_values.size() == r_max) break;
    const double s = sigma[k];
    if (s < kRankTolerance * largest) break;
    DenseVector term_dir(n_terms);
    DenseVector coords(n_docs);
    if (transposed) {
      term_dir = basis[k];
      coords = cols[k];
    } else {
      for (std::size_t i = 0; i < n_terms; ++i) term_dir[i] = cols[k][i] / s;
      for (std::size_t j = 0; j < n_docs; ++j) coords[j] = s * basis[k][j];
    }
    double max_abs = 0.0;
    for (double x : term_dir) max_abs = std::max(max_abs, std::abs(x));
    auto lead = std::find_if(term_dir.begin(), term_dir.end(), [&](double x) {
      return std::abs(x) > 1e-10 * max_abs;
    });
    if (lead != term_dir.end() && *lead < 0.0) {
      for (double& x : term_dir) x = -x;
      for (double& x : coords) x = -x;
    }
    out.singular_values.push_back(s);
    out.term_basis.push_back(std::move(term_dir));
    for (std::size_t j = 0; j < n_docs; ++j) out.doc_coords[j].push_back(coords[j]);
  }
  return out;
}

ClusterModel discover_clusters(const SvdFactors& factors, double q,
                               std::size_t top_terms) {
  if (factors.singular_values.empty()) {
    throw std::invalid_argument("discover_clusters: no singular triples");
  }
  if (!(q > 0.0 && q <= 1.0)) {
    throw std::invalid_argument("retention threshold q must lie in (0, 1]");
  }
  if (top_terms == 0) throw std::invalid_argument("top_terms must be >= 1");

  double total = 0.0;
  for (double s : factors.singular_values) total += s * s;
  std::size_t r = 0;
  double cumulative = 0.0;
  while (r < factors.singular_values.size()) {
    cumulative += factors.singular_values[r] * factors.singular_values[r];
    ++r;
    // Slack so q = 1 is reached despite rounding in the running sum.
    if (cumulative / total >= q - 1e-12) break;
  }

  ClusterModel model;
  model.q = q;
  model.terms = factors.terms;
  for (std::size_t i = 0; i < model.terms.size(); ++i) {
    model.term_index.emplace(model.terms[i], i);
  }
  for (std::size_t c = 0; c < r; ++c) {
    Cluster cluster;
    cluster.basis_direction = factors.term_basis[c];
    cluster.label = top_terms_label(cluster.basis_direction, model.terms, top_terms);
    cluster.vertical = cluster.label;
    model.clusters.push_back(std::move(cluster));
  }
  for (const auto& coords : factors.doc_coords) {
    std::span<const double> kept(coords.data(), std::min(r, coords.size()));
    if (std::all_of(kept.begin(), kept.end(), [](double x) { return x == 0.0; })) {
      continue;
    }
    ++model.clusters[argmax_abs(kept)].member_count;
  }
  return model;
}

std::size_t assign(const SparseVector& doc_vec, const ClusterModel& model) {
  if (model.clusters.empty()) throw std::invalid_argument("cluster model is empty");
  const double doc_norm = doc_vec.norm();
  if (doc_norm == 0.0) throw Error("zero vector");
  std::vector<double> scores;
  scores.reserve(model.clusters.size());
  for (const auto& cluster : model.clusters) {
    const double dir_norm = l2_norm(cluster.basis_direction);
    const double p = project(doc_vec, cluster.basis_direction, model.term_index);
    scores.push_back(dir_norm == 0.0 ? 0.0 : p / (doc_norm * dir_norm));
  }
  return argmax_abs(scores);
}

ClusterModel fit_cluster_model(std::span<const Document> docs, double q,
                               std::size_t top_terms,
                               std::span<const std::string> coarse_labels) {
  if (!coarse_labels.empty() && coarse_labels.size() != docs.size()) {
    throw std::invalid_argument("coarse labels must parallel the documents");
  }
  auto stats = build_corpus_stats(docs);
  std::vector<SparseVector> vecs;
  vecs.reserve(docs.size());
  for (const auto& doc : docs) {
    vecs.push_back(doc.tokens.empty() ? SparseVector{} : tfidf(doc, stats));
  }
  const auto matrix = term_document_matrix(vecs);
  if (matrix.terms.empty()) throw Error("no document carries TF-IDF weight");
  // TODO: switch to a sparse Lanczos solver once reference sets outgrow
  // dense one-sided Jacobi (cost grows with the square of the smaller side).
  const auto factors =
      truncated_svd(matrix, std::min(matrix.values.rows(), matrix.values.cols()));
  auto model = discover_clusters(factors, q, top_terms);
  model.stats = std::move(stats);

  if (!coarse_labels.empty()) {
    for (auto& cluster : model.clusters) {
      std::map<std::string, double> mass;
      for (const auto& label : coarse_labels) mass.emplace(label, 0.0);
      for (std::size_t j = 0; j < vecs.size(); ++j) {
        if (vecs[j].is_zero()) continue;
        mass[coarse_labels[j]] +=
            std::abs(project(vecs[j], cluster.basis_direction, model.term_index));
      }
      auto best = mass.begin();
      for (auto it = mass.begin(); it != mass.end(); ++it) {
        if (it->second > best->second) best = it;
      }
      cluster.vertical = best->first;
    }
  }
  return model;
}

}  // namespace titlesim
