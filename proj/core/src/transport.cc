#include "titlesim/transport.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

#include "titlesim/error.h"

namespace titlesim {
namespace {

// Transportation simplex over an m x n cost matrix. Nodes 0..m-1 are supply
// rows, m..m+n-1 are demand columns; a basis is a spanning tree of m+n-1
// cells on that bipartite graph.
class TransportSimplex {
 public:
  TransportSimplex(std::span<const double> supplies,
                   std::span<const double> demands, const Matrix& costs)
      : m_(supplies.size()),
        n_(demands.size()),
        costs_(costs),
        flow_(m_, n_, 0.0),
        basic_(m_ * n_, 0),
        potential_(m_ + n_, 0.0),
        parent_cell_(m_ + n_, kNoCell),
        parent_node_(m_ + n_, kNoCell),
        adjacency_(m_ + n_) {
    double max_cost = 0.0;
    for (double c : costs.data()) max_cost = std::max(max_cost, c);
    tolerance_ = 1e-12 * std::max(max_cost, std::numeric_limits<double>::min());
    northwest_corner(supplies, demands);
  }

  TransportPlan run() {
    // Dantzig pivots can stall on degenerate bases; Bland's rule cannot cycle.
    const std::size_t stall_limit = m_ + n_;
    const std::size_t max_pivots = 64 * (m_ * n_) * (m_ + n_) + 1024;
    std::size_t degenerate_run = 0;
    bool bland = false;
    for (std::size_t pivot = 0;; ++pivot) {
      if (pivot > max_pivots) throw Error("transport simplex did not converge");
      build_tree();
      const auto entering = find_entering(bland);
      if (!entering) break;
      const bool degenerate = pivot_on(*entering);
      degenerate_run = degenerate ? degenerate_run + 1 : 0;
      if (degenerate_run > stall_limit) bland = true;
    }

    TransportPlan plan;
    plan.objective = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        plan.objective += flow_(i, j) * costs_(i, j);
      }
    }
    plan.flows = std::move(flow_);
    return plan;
  }

 private:
  std::size_t cell(std::size_t i, std::size_t j) const { return i * n_ + j; }
  double& at(std::size_t c) { return flow_(c / n_, c % n_); }

  void northwest_corner(std::span<const double> supplies,
                        std::span<const double> demands) {
    std::vector<double> s(supplies.begin(), supplies.end());
    std::vector<double> d(demands.begin(), demands.end());
    std::size_t i = 0, j = 0;
    while (true) {
      const double x = std::min(s[i], d[j]);
      flow_(i, j) = x;
      basic_[cell(i, j)] = 1;
      s[i] -= x;
      d[j] -= x;
      if (i == m_ - 1 && j == n_ - 1) break;
      // Exactly one index advances per cell, so the staircase has m+n-1
      // cells; a simultaneous exhaustion leaves a degenerate zero cell.
      if (i == m_ - 1) {
        ++j;
      } else if (j == n_ - 1) {
        ++i;
      } else if (s[i] <= d[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  // Potentials u_i + v_j = c_ij on basic cells with u_0 = 0, and the tree
  // parent of every node for cycle tracing.
  void build_tree() {
    for (auto& adj : adjacency_) adj.clear();
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (!basic_[cell(i, j)]) continue;
        adjacency_[i].push_back(m_ + j);
        adjacency_[m_ + j].push_back(i);
      }
    }
    std::vector<char> seen(m_ + n_, 0);
    std::vector<std::size_t> queue{0};
    seen[0] = 1;
    potential_[0] = 0.0;
    parent_cell_[0] = kNoCell;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t node = queue[head];
      for (std::size_t next : adjacency_[node]) {
        if (seen[next]) continue;
        seen[next] = 1;
        const bool from_row = node < m_;
        const std::size_t i = from_row ? node : next;
        const std::size_t j = (from_row ? next : node) - m_;
        potential_[next] = costs_(i, j) - potential_[node];
        parent_cell_[next] = cell(i, j);
        parent_node_[next] = node;
        queue.push_back(next);
      }
    }
    if (queue.size() != m_ + n_) throw Error("transport simplex basis is not a spanning tree");
  }

  double reduced_cost(std::size_t i, std::size_t j) const {
    return costs_(i, j) - potential_[i] - potential_[m_ + j];
  }

  std::optional<std::size_t> find_entering(bool bland) const {
    std::optional<std::size_t> best;
    double best_value = -tolerance_;
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (basic_[cell(i, j)]) continue;
        const double r = reduced_cost(i, j);
        if (r < best_value) {
          if (bland) return cell(i, j);
          best_value = r;
          best = cell(i, j);
        }
      }
    }
    return best;
  }

  // Returns true for a degenerate (zero-step) pivot.
  bool pivot_on(std::size_t entering) {
    const std::size_t row = entering / n_;
    const std::size_t col = entering % n_;

    // The tree is rooted at row 0: walk both endpoints up to their lowest
    // common ancestor. Cells on the column side alternate -,+,-,... starting
    // at the column; cells on the row side alternate the other way.
    std::vector<std::size_t> row_path, col_path;
    {
      std::vector<std::size_t> depth_row = ancestors(row);
      std::vector<std::size_t> depth_col = ancestors(m_ + col);
      // Trim the shared suffix (path to the root) to find the LCA.
      while (depth_row.size() > 1 && depth_col.size() > 1 &&
             depth_row[depth_row.size() - 2] == depth_col[depth_col.size() - 2]) {
        depth_row.pop_back();
        depth_col.pop_back();
      }
      for (std::size_t k = 0; k + 1 < depth_row.size(); ++k) {
        row_path.push_back(parent_cell_[depth_row[k]]);
      }
      for (std::size_t k = 0; k + 1 < depth_col.size(); ++k) {
        col_path.push_back(parent_cell_[depth_col[k]]);
      }
    }

    // Cycle order starting after the entering cell: column side upward, then
    // row side downward. Odd positions (1st, 3rd, ...) lose flow.
    std::vector<std::size_t> cycle = col_path;
    cycle.insert(cycle.end(), row_path.rbegin(), row_path.rend());

    double theta = std::numeric_limits<double>::infinity();
    std::size_t leaving = kNoCell;
    for (std::size_t k = 0; k < cycle.size(); k += 2) {
      const std::size_t c = cycle[k];
      const double f = at(c);
      if (f < theta || (f == theta && c < leaving)) {
        theta = f;
        leaving = c;
      }
    }

    if (leaving == kNoCell) throw Error("transport simplex found no pivot cycle");

    for (std::size_t k = 0; k < cycle.size(); ++k) {
      double& f = at(cycle[k]);
      f = (k % 2 == 0) ? std::max(0.0, f - theta) : f + theta;
    }
    at(entering) = theta;
    at(leaving) = 0.0;
    basic_[entering] = 1;
    basic_[leaving] = 0;
    return theta == 0.0;
  }

  // Node, its parent, ..., root.
  std::vector<std::size_t> ancestors(std::size_t node) const {
    std::vector<std::size_t> chain{node};
    while (parent_cell_[chain.back()] != kNoCell) {
      chain.push_back(parent_node_[chain.back()]);
    }
    return chain;
  }

  static constexpr std::size_t kNoCell = std::numeric_limits<std::size_t>::max();

  std::size_t m_;
  std::size_t n_;
  const Matrix& costs_;
  Matrix flow_;
  std::vector<char> basic_;
  std::vector<double> potential_;
  std::vector<std::size_t> parent_cell_;
  std::vector<std::size_t> parent_node_;
  std::vector<std::vector<std::size_t>> adjacency_;
  double tolerance_ = 0.0;
};

void check_weights(std::span<const double> weights, const char* what) {
  if (weights.empty()) throw std::invalid_argument(std::string(what) + " are empty");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument(std::string(what) + " must be positive and finite");
    }
  }
}

}  // namespace

Matrix ground_cost_matrix(const DiscreteDistribution& src,
                          const DiscreteDistribution& dst) {
  if (src.points.empty() || dst.points.empty()) {
    throw std::invalid_argument("ground_cost_matrix: empty distribution");
  }
  const std::size_t dim = src.points.front().size();
  const auto check = [dim](const DiscreteDistribution& dist) {
    for (const auto& p : dist.points) {
      if (p.size() != dim) {
        throw std::invalid_argument("ground_cost_matrix: dimension mismatch (" +
                                    std::to_string(dim) + " vs " +
                                    std::to_string(p.size()) + ")");
      }
    }
  };
  check(src);
  check(dst);
  Matrix costs(src.points.size(), dst.points.size());
  for (std::size_t i = 0; i < costs.rows(); ++i) {
    for (std::size_t j = 0; j < costs.cols(); ++j) {
      costs(i, j) = euclidean_distance(src.points[i], dst.points[j]);
    }
  }
  return costs;
}

TransportPlan solve_transport(std::span<const double> supplies,
                              std::span<const double> demands,
                              const Matrix& costs) {
  check_weights(supplies, "supplies");
  check_weights(demands, "demands");
  if (costs.rows() != supplies.size() || costs.cols() != demands.size()) {
    throw std::invalid_argument("cost matrix shape does not match the marginals");
  }
  for (double c : costs.data()) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw Error("negative or non-finite cost entry");
    }
  }
  const double supply_total = std::accumulate(supplies.begin(), supplies.end(), 0.0);
  const double demand_total = std::accumulate(demands.begin(), demands.end(), 0.0);
  if (std::abs(supply_total - demand_total) > kMarginalTolerance) {
    throw Error("infeasible marginals: supplies sum to " +
                std::to_string(supply_total) + ", demands to " +
                std::to_string(demand_total));
  }
  return TransportSimplex(supplies, demands, costs).run();
}

WordDistribution resolve(const NBow& doc, const EmbeddingTable& table) {
  WordDistribution out;
  double total = 0.0;
  for (const auto& [token, weight] : doc.entries()) {
    if (auto row = table.find(token)) {
      out.rows.push_back(*row);
      out.weights.push_back(weight);
      total += weight;
    }
  }
  if (out.rows.empty()) throw UnrepresentableError("no embeddable tokens");
  for (double& w : out.weights) w /= total;
  return out;
}

DiscreteDistribution to_distribution(const WordDistribution& doc,
                                     const EmbeddingTable& table) {
  DiscreteDistribution out;
  out.weights = doc.weights;
  for (std::size_t r : doc.rows) {
    auto v = table.row(r);
    out.points.emplace_back(v.begin(), v.end());
  }
  return out;
}

DenseVector weighted_centroid(const WordDistribution& doc,
                              const EmbeddingTable& table) {
  DenseVector c(table.dim(), 0.0);
  for (std::size_t k = 0; k < doc.rows.size(); ++k) {
    auto v = table.row(doc.rows[k]);
    for (std::size_t d = 0; d < c.size(); ++d) c[d] += doc.weights[k] * v[d];
  }
  return c;
}

double wmd(const WordDistribution& a, const WordDistribution& b,
           const EmbeddingTable& table) {
  Matrix costs(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < costs.rows(); ++i) {
    for (std::size_t j = 0; j < costs.cols(); ++j) {
      costs(i, j) = euclidean_distance(table.row(a.rows[i]), table.row(b.rows[j]));
    }
  }
  return solve_transport(a.weights, b.weights, costs).objective;
}

double wmd(const NBow& a, const NBow& b, const EmbeddingTable& table) {
  return wmd(resolve(a, table), resolve(b, table), table);
}

double wcd(const NBow& a, const NBow& b, const EmbeddingTable& table) {
  return euclidean_distance(weighted_centroid(resolve(a, table), table),
                            weighted_centroid(resolve(b, table), table));
}

}  // namespace titlesim
