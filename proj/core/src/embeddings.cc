#include "titlesim/embeddings.h"

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

#include "titlesim/error.h"

namespace titlesim {
namespace {

// Splits on single spaces. Empty fields are kept so doubled separators are
// reported instead of silently skipped.
std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(' ', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

bool parse_size(std::string_view field, std::size_t& out) {
  if (field.empty()) return false;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

bool parse_double(std::string_view field, double& out) {
  if (field.empty()) return false;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

template <typename Table>
Table parse_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing 'V D' header");
  const auto header = split_spaces(line);
  std::size_t count = 0, dim = 0;
  if (header.size() != 2 || !parse_size(header[0], count) ||
      !parse_size(header[1], dim)) {
    throw ParseError(1, "header must be two integers 'V D'");
  }
  if (dim == 0) throw ParseError(1, "dimension must be positive");

  Table table(dim);
  std::vector<double> values(dim);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (table.size() == count) {
      throw ParseError(line_no, "more rows than the declared " +
                                    std::to_string(count));
    }
    std::string_view view(line);
    // The reference word2vec writer leaves one trailing space per row.
    if (!view.empty() && view.back() == ' ') view.remove_suffix(1);
    const auto fields = split_spaces(view);
    if (fields[0].empty()) throw ParseError(line_no, "missing word");
    if (fields.size() - 1 != dim) {
      throw ParseError(line_no, "expected " + std::to_string(dim) +
                                    " values, found " +
                                    std::to_string(fields.size() - 1));
    }
    for (std::size_t d = 0; d < dim; ++d) {
      if (!parse_double(fields[d + 1], values[d])) {
        throw ParseError(line_no, "non-numeric value '" +
                                      std::string(fields[d + 1]) + "'");
      }
    }
    if (table.contains(fields[0])) {
      throw ParseError(line_no, "duplicate word '" + std::string(fields[0]) + "'");
    }
    table.add(std::string(fields[0]), values);
  }
  if (in.bad()) throw Error("read failure");
  if (table.size() != count) {
    throw ParseError(line_no, "declared " + std::to_string(count) +
                                  " rows, found " + std::to_string(table.size()));
  }
  return table;
}

void append_double(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

VectorTable::VectorTable(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw std::invalid_argument("vector table dimension must be positive");
}

void VectorTable::add(std::string key, std::span<const double> values) {
  if (values.size() != dim_) {
    throw std::invalid_argument("vector for '" + key + "' has length " +
                                std::to_string(values.size()) + ", expected " +
                                std::to_string(dim_));
  }
  if (index_.contains(key)) throw Error("duplicate key '" + key + "'");
  index_.emplace(key, keys_.size());
  keys_.push_back(std::move(key));
  values_.insert(values_.end(), values.begin(), values.end());
}

std::optional<std::size_t> VectorTable::find(std::string_view key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const double> VectorTable::at(std::string_view key) const {
  auto row_index = find(key);
  if (!row_index) throw Error("'" + std::string(key) + "' not in table");
  return row(*row_index);
}

EmbeddingTable EmbeddingTable::scaled(double factor) const {
  EmbeddingTable out(dim());
  DenseVector buf(dim());
  for (std::size_t r = 0; r < size(); ++r) {
    auto v = row(r);
    std::transform(v.begin(), v.end(), buf.begin(),
                   [factor](double x) { return x * factor; });
    out.add(key(r), buf);
  }
  return out;
}

EmbeddingTable load_embeddings(std::istream& in) {
  return parse_table<EmbeddingTable>(in);
}

DocVecTable load_docvecs(std::istream& in) { return parse_table<DocVecTable>(in); }

void save_vectors(const VectorTable& table, std::ostream& out) {
  std::string line;
  out << table.size() << ' ' << table.dim() << '\n';
  for (std::size_t r = 0; r < table.size(); ++r) {
    line = table.key(r);
    for (double v : table.row(r)) {
      line.push_back(' ');
      append_double(line, v);
    }
    line.push_back('\n');
    out << line;
  }
  if (!out) throw Error("write failure");
}

DenseVector centroid(std::span<const Token> tokens, const EmbeddingTable& table) {
  // Summing per row in row order makes the result independent of token order.
  std::map<std::size_t, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& t : tokens) {
    if (auto r = table.find(t)) {
      ++counts[*r];
      ++total;
    }
  }
  if (total == 0) throw UnrepresentableError("no embeddable tokens");
  DenseVector sum(table.dim(), 0.0);
  for (const auto& [r, count] : counts) {
    const double c = static_cast<double>(count);
    auto v = table.row(r);
    for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += c * v[d];
  }
  for (double& x : sum) x /= static_cast<double>(total);
  return sum;
}

std::vector<WordScore> nearest_words(std::span<const double> query,
                                     std::size_t n, const EmbeddingTable& table,
                                     const std::set<std::string>& exclude) {
  if (n == 0) throw std::invalid_argument("nearest_words: n must be >= 1");
  if (query.size() != table.dim()) {
    throw std::invalid_argument("nearest_words: query dimension mismatch");
  }
  const double query_norm = l2_norm(query);
  if (query_norm == 0.0) throw Error("zero vector");

  std::vector<WordScore> scores;
  scores.reserve(table.size());
  for (std::size_t r = 0; r < table.size(); ++r) {
    if (exclude.contains(table.key(r))) continue;
    const double row_norm = l2_norm(table.row(r));
    if (row_norm == 0.0) continue;
    scores.push_back({table.key(r), dot(query, table.row(r)) / (query_norm * row_norm)});
  }
  const auto better = [](const WordScore& a, const WordScore& b) {
    if (a.cosine != b.cosine) return a.cosine > b.cosine;
    return a.word < b.word;
  };
  const std::size_t keep = std::min(n, scores.size());
  std::partial_sort(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(keep),
                    scores.end(), better);
  scores.resize(keep);
  return scores;
}

std::string analogy(std::string_view a, std::string_view b, std::string_view c,
                    const EmbeddingTable& table) {
  const auto va = table.at(a);
  const auto vb = table.at(b);
  const auto vc = table.at(c);
  DenseVector query(table.dim());
  for (std::size_t d = 0; d < query.size(); ++d) query[d] = vb[d] - va[d] + vc[d];
  const auto best = nearest_words(
      query, 1, table, {std::string(a), std::string(b), std::string(c)});
  if (best.empty()) throw Error("analogy: no candidate words left");
  return best.front().word;
}

}  // namespace titlesim
