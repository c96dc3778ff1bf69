#include "hpde/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hpde/error.hpp"
#include "hpde/kernels.hpp"

namespace hpde {

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> d(n_);
  for (std::size_t i = 0; i < n_; ++i) d[i] = degree(i);
  return d;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (std::size_t i = 0; i < n_; ++i)
    for (auto j : neighbors(i))
      if (static_cast<std::int64_t>(i) < j) out.emplace_back(i, j);
  return out;
}

Graph build_graph(std::size_t n, std::span<const Edge> edges) {
  const auto sn = static_cast<NodeId>(n);
  std::vector<Edge> directed;
  directed.reserve(2 * edges.size());
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= sn || v >= sn) {
      throw InputError("build_graph: edge (" + std::to_string(u) + ", " +
                       std::to_string(v) + ") has an endpoint outside [0, " +
                       std::to_string(n) + ")");
    }
    if (u == v) {
      throw InputError("build_graph: self-loop at node " + std::to_string(u));
    }
    directed.emplace_back(u, v);
    directed.emplace_back(v, u);
  }
  std::sort(directed.begin(), directed.end());
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

  Graph g;
  g.n_ = n;
  g.row_offsets_.assign(n + 1, 0);
  g.col_indices_.reserve(directed.size());
  for (const auto& [u, v] : directed) {
    ++g.row_offsets_[u + 1];
    g.col_indices_.push_back(v);
  }
  for (std::size_t i = 0; i < n; ++i) g.row_offsets_[i + 1] += g.row_offsets_[i];
  return g;
}

Graph grid_graph(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw InputError("grid_graph: dimensions must be >= 1, got " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
  std::vector<Edge> edges;
  edges.reserve(rows * (cols - 1) + cols * (rows - 1));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const auto id = static_cast<NodeId>(r * cols + c);
      if (c + 1 < cols) edges.emplace_back(id, id + 1);
      if (r + 1 < rows) edges.emplace_back(id, id + static_cast<NodeId>(cols));
    }
  }
  return build_graph(rows * cols, edges);
}

Graph path_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i)
    edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(i + 1));
  return build_graph(n, edges);
}

SparseSymMatrix::SparseSymMatrix(std::size_t n, std::vector<std::int64_t> row_offsets,
                                 std::vector<std::int64_t> col_indices,
                                 std::vector<double> values)
    : n_(n),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  if (row_offsets_.size() != n_ + 1 || col_indices_.size() != values_.size() ||
      static_cast<std::size_t>(row_offsets_.back()) != values_.size()) {
    throw InputError("SparseSymMatrix: inconsistent CSR arrays");
  }
}

double SparseSymMatrix::at(std::size_t i, std::size_t j) const {
  const auto begin = col_indices_.begin() + row_offsets_[i];
  const auto end = col_indices_.begin() + row_offsets_[i + 1];
  const auto it = std::lower_bound(begin, end, static_cast<std::int64_t>(j));
  if (it == end || *it != static_cast<std::int64_t>(j)) return 0.0;
  return values_[it - col_indices_.begin()];
}

DenseMatrix SparseSymMatrix::to_dense() const {
  DenseMatrix d(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (auto p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p)
      d(i, col_indices_[p]) = values_[p];
  return d;
}

namespace {

// Graph pattern plus diagonal, with per-entry values from the callbacks.
template <typename Diag, typename Off>
SparseSymMatrix assemble(const Graph& g, Diag diag, Off off) {
  const std::size_t n = g.num_nodes();
  std::vector<std::int64_t> offsets(n + 1, 0);
  std::vector<std::int64_t> cols;
  std::vector<double> vals;
  cols.reserve(2 * g.num_edges() + n);
  vals.reserve(2 * g.num_edges() + n);
  for (std::size_t i = 0; i < n; ++i) {
    bool placed = false;
    const auto si = static_cast<std::int64_t>(i);
    for (auto j : g.neighbors(i)) {
      if (!placed && j > si) {
        cols.push_back(si);
        vals.push_back(diag(i));
        placed = true;
      }
      cols.push_back(j);
      vals.push_back(off(i, static_cast<std::size_t>(j)));
    }
    if (!placed) {
      cols.push_back(si);
      vals.push_back(diag(i));
    }
    offsets[i + 1] = static_cast<std::int64_t>(cols.size());
  }
  return SparseSymMatrix(n, std::move(offsets), std::move(cols), std::move(vals));
}

}  // namespace

SparseSymMatrix combinatorial_laplacian(const Graph& g) {
  return assemble(
      g, [&](std::size_t i) { return static_cast<double>(g.degree(i)); },
      [](std::size_t, std::size_t) { return -1.0; });
}

SparseSymMatrix normalized_laplacian(const Graph& g) {
  std::vector<double> inv_sqrt(g.num_nodes(), 0.0);
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    const auto d = g.degree(i);
    if (d > 0) inv_sqrt[i] = 1.0 / std::sqrt(static_cast<double>(d));
  }
  return assemble(
      g, [&](std::size_t i) { return g.degree(i) > 0 ? 1.0 : 0.0; },
      [&](std::size_t i, std::size_t j) { return -inv_sqrt[i] * inv_sqrt[j]; });
}

SparseSymMatrix laplacian(const Graph& g, LaplacianKind kind) {
  return kind == LaplacianKind::kCombinatorial ? combinatorial_laplacian(g)
                                               : normalized_laplacian(g);
}

void spmv(const SparseSymMatrix& m, std::span<const double> x, std::span<double> y) {
  if (x.size() != m.dim() || y.size() != m.dim()) {
    throw InputError("spmv: vector length " + std::to_string(x.size()) +
                     " does not match matrix dimension " + std::to_string(m.dim()));
  }
  kernels::active().spmv_csr(m.dim(), m.row_offsets().data(),
                             m.col_indices().data(), m.values().data(), x.data(),
                             y.data());
}

std::vector<double> spmv(const SparseSymMatrix& m, std::span<const double> x) {
  std::vector<double> y(m.dim());
  spmv(m, x, y);
  return y;
}

DenseMatrix spmm(const SparseSymMatrix& m, const DenseMatrix& x) {
  if (x.rows() != m.dim()) throw InputError("spmm: row count mismatch");
  DenseMatrix y(x.rows(), x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) spmv(m, x.col(j), y.col(j));
  return y;
}

Graph read_edge_list(std::istream& in) {
  std::string line;
  auto next_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      if (out.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line(line)) throw InputError("edge list: missing header line");
  std::istringstream header(line);
  long long n = -1;
  long long m = -1;
  if (!(header >> n >> m) || n < 0 || m < 0) {
    throw InputError("edge list: header must be \"n m\", got \"" + line + "\"");
  }
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long k = 0; k < m; ++k) {
    if (!next_line(line)) {
      throw InputError("edge list: expected " + std::to_string(m) +
                       " edges, found " + std::to_string(k));
    }
    std::istringstream row(line);
    NodeId u = 0;
    NodeId v = 0;
    if (!(row >> u >> v)) throw InputError("edge list: bad edge line \"" + line + "\"");
    edges.emplace_back(u, v);
  }
  return build_graph(static_cast<std::size_t>(n), edges);
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open edge list " + path);
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  const auto edges = g.edges();
  out << g.num_nodes() << ' ' << edges.size() << '\n';
  for (const auto& [u, v] : edges) out << u << ' ' << v << '\n';
}

void write_edge_list_file(const std::string& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write edge list " + path);
  write_edge_list(out, g);
  if (!out) throw InputError("failed writing edge list " + path);
}

}  // namespace hpde
