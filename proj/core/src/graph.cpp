#include <mgcn/graph.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace mgcn {

Vector Graph::degrees() const {
  Vector d = Vector::Zero(n);
  for (Index r = 0; r < n; ++r) {
    for (double w : adjacency.row_values(r)) d[r] += w;
  }
  return d;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(edge_count()));
  for (Index r = 0; r < n; ++r) {
    const auto cols = adjacency.row_cols(r);
    const auto vals = adjacency.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (cols[k] > r) out.push_back({r, cols[k], vals[k]});
    }
  }
  return out;
}

Graph build_graph(std::span<const Edge> edges, Index n) {
  if (n <= 0) throw InvalidArgument("build_graph: node count must be positive");
  std::vector<Triplet> triplets;
  triplets.reserve(edges.size() * 2);
  for (const auto& e : edges) {
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n) {
      throw InvalidArgument("build_graph: edge (" + std::to_string(e.src) + ", " + std::to_string(e.dst) +
                            ") out of range for n = " + std::to_string(n));
    }
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
      throw InvalidArgument("build_graph: edge weights must be finite and non-negative");
    }
    if (e.src == e.dst) continue;
    triplets.push_back({e.src, e.dst, e.weight});
    triplets.push_back({e.dst, e.src, e.weight});
  }
  return Graph{n, SparseMatrix::from_triplets(n, n, triplets, DuplicatePolicy::max)};
}

namespace {

Index parse_index(std::string_view field, std::size_t line_no) {
  Index value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || value < 0) {
    throw DataError("edge list line " + std::to_string(line_no) + ": bad index '" + std::string(field) + "'");
  }
  return value;
}

double parse_weight(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw DataError("edge list line " + std::to_string(line_no) + ": bad weight '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

std::vector<Edge> read_edge_list(std::istream& in) {
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;

    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      const auto tab = rest.find('\t');
      fields.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    if (fields.size() != 2 && fields.size() != 3) {
      throw DataError("edge list line " + std::to_string(line_no) + ": expected 2 or 3 tab-separated fields");
    }
    Edge e{parse_index(fields[0], line_no), parse_index(fields[1], line_no), 1.0};
    if (fields.size() == 3) e.weight = parse_weight(fields[2], line_no);
    edges.push_back(e);
  }
  return edges;
}

std::vector<Edge> read_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open edge list " + path.string());
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  char buf[64];
  for (const auto& e : g.edges()) {
    const auto end = std::to_chars(buf, buf + sizeof(buf), e.weight).ptr;
    out << e.src << '\t' << e.dst << '\t' << std::string_view(buf, static_cast<std::size_t>(end - buf)) << '\n';
  }
}

SparseMatrix normalized_kernel(const Graph& g) {
  // Degrees of A + I; always >= 1.
  const Vector d = g.degrees().array() + 1.0;
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(g.adjacency.nnz() + g.n));
  for (Index r = 0; r < g.n; ++r) {
    triplets.push_back({r, r, 1.0 / d[r]});
    const auto cols = g.adjacency.row_cols(r);
    const auto vals = g.adjacency.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      triplets.push_back({r, cols[k], vals[k] / std::sqrt(d[r] * d[cols[k]])});
    }
  }
  return SparseMatrix::from_triplets(g.n, g.n, triplets);
}

SparseMatrix laplacian(const Graph& g) {
  const Vector deg = g.degrees();
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(g.adjacency.nnz() + g.n));
  for (Index r = 0; r < g.n; ++r) {
    if (deg[r] != 0.0) triplets.push_back({r, r, deg[r]});
    const auto cols = g.adjacency.row_cols(r);
    const auto vals = g.adjacency.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) triplets.push_back({r, cols[k], -vals[k]});
  }
  return SparseMatrix::from_triplets(g.n, g.n, triplets);
}

Matrix LaplacianBlocks::to_labeled_first(const Matrix& by_node) const {
  if (by_node.rows() != l + u) throw InvalidArgument("to_labeled_first: row count mismatch");
  Matrix out(by_node.rows(), by_node.cols());
  for (Index i = 0; i < by_node.rows(); ++i) out.row(i) = by_node.row(order[static_cast<std::size_t>(i)]);
  return out;
}

Matrix LaplacianBlocks::to_original(const Matrix& labeled_first) const {
  if (labeled_first.rows() != l + u) throw InvalidArgument("to_original: row count mismatch");
  Matrix out(labeled_first.rows(), labeled_first.cols());
  for (Index i = 0; i < labeled_first.rows(); ++i) out.row(order[static_cast<std::size_t>(i)]) = labeled_first.row(i);
  return out;
}

LaplacianBlocks partition_laplacian(const SparseMatrix& lap, std::span<const Index> labeled) {
  const Index n = lap.rows();
  if (lap.cols() != n) throw InvalidArgument("partition_laplacian: Laplacian must be square");
  std::vector<char> is_labeled(static_cast<std::size_t>(n), 0);
  for (Index i : labeled) {
    if (i < 0 || i >= n) throw InvalidArgument("partition_laplacian: labeled index out of range");
    if (is_labeled[i]) throw InvalidArgument("partition_laplacian: duplicate labeled index");
    is_labeled[i] = 1;
  }
  const Index l = static_cast<Index>(labeled.size());
  if (l == 0) throw InvalidArgument("partition_laplacian: no labeled nodes (no supervision)");
  if (l == n) throw InvalidArgument("partition_laplacian: every node is labeled (nothing to predict)");

  LaplacianBlocks blocks;
  blocks.l = l;
  blocks.u = n - l;
  blocks.order.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    if (is_labeled[i]) blocks.order.push_back(i);
  }
  for (Index i = 0; i < n; ++i) {
    if (!is_labeled[i]) blocks.order.push_back(i);
  }
  blocks.position.resize(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) blocks.position[blocks.order[k]] = k;

  blocks.permuted = lap.permuted(blocks.position);
  blocks.ll = blocks.permuted.block(0, l, 0, l);
  blocks.ul = blocks.permuted.block(l, blocks.u, 0, l);
  blocks.uu = blocks.permuted.block(l, blocks.u, l, blocks.u);
  return blocks;
}

double quadratic_form(const SparseMatrix& lap, const Matrix& y) {
  if (lap.rows() != y.rows() || lap.cols() != y.rows()) {
    throw InvalidArgument("quadratic_form: Laplacian is " + std::to_string(lap.rows()) + "x" +
                          std::to_string(lap.cols()) + " but Y has " + std::to_string(y.rows()) + " rows");
  }
  return (y.array() * spmm(lap, y).array()).sum();
}

}  // namespace mgcn
