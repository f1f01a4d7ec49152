#pragma once

#include <mgcn/dataset.hpp>
#include <mgcn/graph.hpp>

#include <vector>

// Independent dense reference implementations used as test oracles.
namespace mgcn::testing {

using DenseMatrix = Eigen::MatrixXd;

/// Erdos-Renyi graph; weights are 1 or uniform on (0.1, 2) when `weighted`.
std::vector<Edge> random_edges(Index n, double p, Rng& rng, bool weighted = false);
Graph random_graph(Index n, double p, Rng& rng, bool weighted = false);

/// Dense symmetric adjacency straight from an edge list (max on duplicates).
DenseMatrix dense_adjacency(std::span<const Edge> edges, Index n);

DenseMatrix dense_kernel(const DenseMatrix& a);
DenseMatrix dense_laplacian(const DenseMatrix& a);

/// sum_ij a_ij ||y_i - y_j||^2 by a double loop.
double pairwise_sum(const DenseMatrix& a, const DenseMatrix& y);

Matrix gaussian(Index rows, Index cols, Rng& rng);
Matrix random_orthonormal(Index d, Index c, Rng& rng);

/// k distinct sorted indices from [0, n).
std::vector<Index> random_subset(Index n, Index k, Rng& rng);

/// Minimiser of ||Z - [Y_l; Y_u]||^2 + lambda Tr(Y^T L Y) over Y_u with the
/// full dense Laplacian in original node order. `z_unlabeled` rows follow
/// the ascending order of the unlabeled nodes.
DenseMatrix dense_soft_labels(const DenseMatrix& a, std::span<const Index> labeled, const DenseMatrix& z_unlabeled,
                              const DenseMatrix& y_labeled, double lambda);

/// Same minimiser by plain gradient descent on the objective.
DenseMatrix descent_soft_labels(const DenseMatrix& a, std::span<const Index> labeled, const DenseMatrix& z_unlabeled,
                                const DenseMatrix& y_labeled, double lambda, int iterations);

double nuclear_norm(const Matrix& p);

/// max |a - b| / max(1, max |b|).
double relative_error(const DenseMatrix& a, const DenseMatrix& b);

/// Small dataset with a clear class signal, for end-to-end checks.
Dataset toy_dataset(Index nodes, Index classes, std::uint64_t seed);

}  // namespace mgcn::testing

#include <filesystem>

namespace mgcn::testing {

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace mgcn::testing
