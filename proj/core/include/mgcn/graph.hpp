#pragma once

#include <mgcn/sparse.hpp>

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace mgcn {

struct Edge {
  Index src = 0;
  Index dst = 0;
  double weight = 1.0;
};

/// Undirected weighted graph: symmetric adjacency, zero diagonal, weights >= 0.
struct Graph {
  Index n = 0;
  SparseMatrix adjacency;

  /// Number of undirected edges (each stored twice in the adjacency).
  Index edge_count() const noexcept { return adjacency.nnz() / 2; }
  Vector degrees() const;
  /// Edges with src < dst in row-major order.
  std::vector<Edge> edges() const;
};

/// Symmetrises the edge list. Parallel edges keep the largest weight, self
/// edges are dropped and an unspecified weight defaults to 1.
Graph build_graph(std::span<const Edge> edges, Index n);

/// Parses `src<TAB>dst[<TAB>weight]` lines with 0-based indices; blank lines
/// and `#` comments are skipped.
std::vector<Edge> read_edge_list(std::istream& in);
std::vector<Edge> read_edge_list(const std::filesystem::path& path);
void write_edge_list(std::ostream& out, const Graph& g);

/// D~^{-1/2} (A + I) D~^{-1/2} with D~ the degree matrix of A + I.
SparseMatrix normalized_kernel(const Graph& g);

/// L = D - A.
SparseMatrix laplacian(const Graph& g);

/// Laplacian split under the labeled-first ordering.
///
/// `position[original] = labeled-first index` and `order[labeled-first] =
/// original`. Labeled nodes keep ascending original order, as do unlabeled.
struct LaplacianBlocks {
  Index l = 0;
  Index u = 0;
  SparseMatrix ll;        // l x l
  SparseMatrix ul;        // u x l
  SparseMatrix uu;        // u x u
  SparseMatrix permuted;  // full L in labeled-first order
  std::vector<Index> position;
  std::vector<Index> order;

  /// Reorders rows of an n-row matrix from original to labeled-first order.
  Matrix to_labeled_first(const Matrix& by_node) const;
  /// Inverse of to_labeled_first.
  Matrix to_original(const Matrix& labeled_first) const;
  /// Original node index of the i-th unlabeled row.
  Index unlabeled_node(Index i) const { return order[static_cast<std::size_t>(l + i)]; }
};

LaplacianBlocks partition_laplacian(const SparseMatrix& lap, std::span<const Index> labeled);

/// Tr(Y^T L Y). Equals half of sum_ij a_ij ||y_i - y_j||^2 for L = D - A.
double quadratic_form(const SparseMatrix& lap, const Matrix& y);

}  // namespace mgcn
