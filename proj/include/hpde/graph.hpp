#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hpde/dense.hpp"

namespace hpde {

using NodeId = std::int64_t;
using Edge = std::pair<NodeId, NodeId>;

// Undirected, unweighted graph without self-loops in CSR form. Both
// directions of every edge are stored; neighbors are sorted per row.
class Graph {
 public:
  Graph() = default;

  std::size_t num_nodes() const { return n_; }
  std::size_t num_edges() const { return col_indices_.size() / 2; }

  std::span<const std::int64_t> row_offsets() const { return row_offsets_; }
  std::span<const std::int64_t> col_indices() const { return col_indices_; }
  std::span<const std::int64_t> neighbors(std::size_t i) const {
    return std::span<const std::int64_t>(col_indices_)
        .subspan(row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]);
  }
  std::size_t degree(std::size_t i) const {
    return static_cast<std::size_t>(row_offsets_[i + 1] - row_offsets_[i]);
  }
  std::vector<std::size_t> degrees() const;

  // Each undirected edge once, as (u, v) with u < v, in CSR order.
  std::vector<Edge> edges() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  friend Graph build_graph(std::size_t n, std::span<const Edge> edges);

  std::size_t n_ = 0;
  std::vector<std::int64_t> row_offsets_{0};
  std::vector<std::int64_t> col_indices_;
};

// Builds a graph from unordered pairs. Duplicates and reversed pairs are
// merged. Throws InputError on out-of-range endpoints and self-loops.
Graph build_graph(std::size_t n, std::span<const Edge> edges);

// rows x cols lattice, node id r * cols + c, 4-neighborhood.
Graph grid_graph(std::size_t rows, std::size_t cols);

// Path graph 0 - 1 - ... - (n-1).
Graph path_graph(std::size_t n);

// Symmetric sparse matrix sharing a graph's sparsity pattern plus the
// diagonal. Entries in each row are sorted by column.
class SparseSymMatrix {
 public:
  SparseSymMatrix() = default;
  SparseSymMatrix(std::size_t n, std::vector<std::int64_t> row_offsets,
                  std::vector<std::int64_t> col_indices,
                  std::vector<double> values);

  std::size_t dim() const { return n_; }
  std::size_t nnz() const { return values_.size(); }
  std::span<const std::int64_t> row_offsets() const { return row_offsets_; }
  std::span<const std::int64_t> col_indices() const { return col_indices_; }
  std::span<const double> values() const { return values_; }

  // Stored value at (i, j), zero when absent.
  double at(std::size_t i, std::size_t j) const;
  DenseMatrix to_dense() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::int64_t> row_offsets_{0};
  std::vector<std::int64_t> col_indices_;
  std::vector<double> values_;
};

enum class LaplacianKind { kCombinatorial, kNormalized };

// D - A.
SparseSymMatrix combinatorial_laplacian(const Graph& g);
// I - D^{-1/2} A D^{-1/2}; isolated nodes get an all-zero row and column.
SparseSymMatrix normalized_laplacian(const Graph& g);
SparseSymMatrix laplacian(const Graph& g, LaplacianKind kind);

// y = m x.
std::vector<double> spmv(const SparseSymMatrix& m, std::span<const double> x);
void spmv(const SparseSymMatrix& m, std::span<const double> x, std::span<double> y);
// Column-wise product with an n x d feature matrix.
DenseMatrix spmm(const SparseSymMatrix& m, const DenseMatrix& x);

// Edge-list text: "n m" header then m lines "u v".
Graph read_edge_list(std::istream& in);
Graph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& g);
void write_edge_list_file(const std::string& path, const Graph& g);

}  // namespace hpde
