#include <mgcn/graph.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace mgcn {
namespace {

using testing::DenseMatrix;

Graph path3() { return build_graph(std::vector<Edge>{{0, 1}, {1, 2}}, 3); }

TEST(BuildGraph, SingleEdge) {
  const Graph g = build_graph(std::vector<Edge>{{0, 1}}, 2);
  EXPECT_EQ(g.adjacency.to_dense(), (Matrix(2, 2) << 0, 1, 1, 0).finished());
  EXPECT_EQ(g.edge_count(), 1);
}

TEST(BuildGraph, ReverseDuplicateIsMerged) {
  const Graph a = build_graph(std::vector<Edge>{{0, 1}}, 2);
  const Graph b = build_graph(std::vector<Edge>{{0, 1}, {1, 0}}, 2);
  EXPECT_EQ(a.adjacency, b.adjacency);
}

TEST(BuildGraph, DuplicatesKeepMaxWeightAndSelfEdgesDrop) {
  const Graph g = build_graph(std::vector<Edge>{{0, 1, 0.5}, {1, 0, 2.0}, {0, 1, 1.0}, {2, 2, 4.0}}, 3);
  EXPECT_DOUBLE_EQ(g.adjacency.coeff(0, 1), 2.0);
  EXPECT_DOUBLE_EQ(g.adjacency.coeff(1, 0), 2.0);
  EXPECT_DOUBLE_EQ(g.adjacency.coeff(2, 2), 0.0);
  EXPECT_EQ(g.edge_count(), 1);
}

TEST(BuildGraph, Errors) {
  EXPECT_THROW(build_graph(std::vector<Edge>{}, 0), InvalidArgument);
  EXPECT_THROW(build_graph(std::vector<Edge>{{0, 2}}, 2), InvalidArgument);
  EXPECT_THROW(build_graph(std::vector<Edge>{{-1, 0}}, 2), InvalidArgument);
  EXPECT_THROW(build_graph(std::vector<Edge>{{0, 1, -1.0}}, 2), InvalidArgument);
}

TEST(BuildGraph, RandomGraphsSatisfyInvariants) {
  Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const auto edges = testing::random_edges(15, 0.3, rng, true);
    const Graph g = build_graph(edges, 15);
    EXPECT_TRUE(g.adjacency.is_symmetric());
    EXPECT_EQ(g.adjacency.to_dense(), Matrix(testing::dense_adjacency(edges, 15)));
    for (double w : g.adjacency.values()) EXPECT_GT(w, 0.0);
    for (Index i = 0; i < 15; ++i) EXPECT_EQ(g.adjacency.coeff(i, i), 0.0);
  }
}

TEST(EdgeList, ParsesTabsCommentsAndWeights) {
  std::istringstream in("# header\n0\t1\n1\t2\t0.5\n\n");
  const auto edges = read_edge_list(in);
  ASSERT_EQ(edges.size(), 2u);
  EXPECT_DOUBLE_EQ(edges[0].weight, 1.0);
  EXPECT_DOUBLE_EQ(edges[1].weight, 0.5);
}

TEST(EdgeList, MalformedLinesThrow) {
  std::istringstream three_fields_missing("0\n");
  EXPECT_THROW(read_edge_list(three_fields_missing), DataError);
  std::istringstream bad_index("a\t1\n");
  EXPECT_THROW(read_edge_list(bad_index), DataError);
  std::istringstream bad_weight("0\t1\tx\n");
  EXPECT_THROW(read_edge_list(bad_weight), DataError);
}

TEST(EdgeList, WriteReadRoundTrip) {
  Rng rng(12);
  const Graph g = testing::random_graph(12, 0.3, rng, true);
  std::stringstream buf;
  write_edge_list(buf, g);
  EXPECT_EQ(build_graph(read_edge_list(buf), 12).adjacency, g.adjacency);
}

TEST(NormalizedKernel, TwoNodeEdge) {
  const Matrix k = normalized_kernel(build_graph(std::vector<Edge>{{0, 1}}, 2)).to_dense();
  EXPECT_EQ(k, Matrix::Constant(2, 2, 0.5));
}

TEST(NormalizedKernel, IsolatedNode) {
  EXPECT_EQ(normalized_kernel(build_graph(std::vector<Edge>{}, 1)).to_dense(), Matrix::Ones(1, 1));
}

TEST(NormalizedKernel, MatchesDenseFormula) {
  Rng rng(20);
  for (int trial = 0; trial < 10; ++trial) {
    const auto edges = testing::random_edges(10, 0.35, rng, trial % 2 == 1);
    const Matrix k = normalized_kernel(build_graph(edges, 10)).to_dense();
    const DenseMatrix oracle = testing::dense_kernel(testing::dense_adjacency(edges, 10));
    EXPECT_LE((DenseMatrix(k) - oracle).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(NormalizedKernel, DiagonalIsInverseDegreePlusOne) {
  Rng rng(21);
  const Graph g = testing::random_graph(25, 0.2, rng);
  const Vector diag = normalized_kernel(g).diagonal();
  const Vector deg = g.degrees();
  for (Index i = 0; i < 25; ++i) EXPECT_NEAR(diag(i), 1.0 / (deg(i) + 1.0), 1e-15);
}

double power_iteration_radius(const SparseMatrix& k, Rng& rng) {
  Vector v = testing::gaussian(k.rows(), 1, rng).col(0);
  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    v /= v.norm();
    Vector w = spmv(k, v);
    lambda = v.dot(w);
    v = w;
  }
  return std::abs(lambda);
}

TEST(NormalizedKernelProperty, SymmetricWithSpectrumInUnitInterval) {
  Rng rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = testing::random_graph(12 + trial, 0.25, rng, true);
    const SparseMatrix k = normalized_kernel(g);
    EXPECT_TRUE(k.is_symmetric());
    EXPECT_LE(power_iteration_radius(k, rng), 1.0 + 1e-9);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<DenseMatrix>(DenseMatrix(k.to_dense())).eigenvalues();
    EXPECT_GE(ev.minCoeff(), -1.0 - 1e-12);
    EXPECT_LE(ev.maxCoeff(), 1.0 + 1e-12);
  }
}

TEST(Laplacian, TwoNodeEdge) {
  EXPECT_EQ(laplacian(build_graph(std::vector<Edge>{{0, 1}}, 2)).to_dense(), (Matrix(2, 2) << 1, -1, -1, 1).finished());
}

TEST(Laplacian, EdgelessIsZero) {
  const SparseMatrix l = laplacian(build_graph(std::vector<Edge>{}, 4));
  EXPECT_EQ(l.nnz(), 0);
  EXPECT_EQ(l.to_dense(), Matrix(Matrix::Zero(4, 4)));
}

TEST(Laplacian, RowsSumToZeroAndSmallestEigenvalueNonNegative) {
  Rng rng(30);
  for (int trial = 0; trial < 10; ++trial) {
    const auto edges = testing::random_edges(20, 0.2, rng, true);
    const Graph g = build_graph(edges, 20);
    const SparseMatrix l = laplacian(g);
    EXPECT_TRUE(l.is_symmetric());
    const Matrix d = l.to_dense();
    EXPECT_LE(d.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((l.diagonal() - g.degrees()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LE((DenseMatrix(d) - testing::dense_laplacian(testing::dense_adjacency(edges, 20))).cwiseAbs().maxCoeff(),
              1e-14);
    const double smallest = Eigen::SelfAdjointEigenSolver<DenseMatrix>(DenseMatrix(d)).eigenvalues().minCoeff();
    EXPECT_GE(smallest, -1e-10);
  }
}

TEST(LaplacianProperty, QuadraticFormNonNegativeForRandomVectors) {
  Rng rng(31);
  for (Index n : {5, 17, 33, 50}) {
    const SparseMatrix l = laplacian(testing::random_graph(n, 0.15, rng, true));
    for (int k = 0; k < 100; ++k) {
      const Vector v = testing::gaussian(n, 1, rng).col(0);
      EXPECT_GE(v.dot(spmv(l, v)), -1e-10);
    }
  }
}

TEST(PartitionLaplacian, PathGraphLabeledEndpoint) {
  const std::vector<Index> labeled{0};
  const LaplacianBlocks b = partition_laplacian(laplacian(path3()), labeled);
  EXPECT_EQ(b.l, 1);
  EXPECT_EQ(b.u, 2);
  EXPECT_EQ(b.uu.to_dense(), (Matrix(2, 2) << 2, -1, -1, 1).finished());
  EXPECT_EQ(b.ul.to_dense(), (Matrix(2, 1) << -1, 0).finished());
}

TEST(PartitionLaplacian, AllButOneLabeled) {
  Rng rng(40);
  const Graph g = testing::random_graph(8, 0.5, rng);
  const std::vector<Index> labeled{0, 1, 2, 3, 5, 6, 7};
  const LaplacianBlocks b = partition_laplacian(laplacian(g), labeled);
  ASSERT_EQ(b.u, 1);
  EXPECT_EQ(b.uu.to_dense()(0, 0), g.degrees()(4));
  EXPECT_EQ(b.unlabeled_node(0), 4);
}

TEST(PartitionLaplacian, Errors) {
  const SparseMatrix l = laplacian(path3());
  EXPECT_THROW(partition_laplacian(l, std::vector<Index>{}), InvalidArgument);
  EXPECT_THROW(partition_laplacian(l, std::vector<Index>{0, 1, 2}), InvalidArgument);
  EXPECT_THROW(partition_laplacian(l, std::vector<Index>{0, 0}), InvalidArgument);
  EXPECT_THROW(partition_laplacian(l, std::vector<Index>{3}), InvalidArgument);
}

TEST(PartitionLaplacianProperty, BlocksReassembleThePermutedLaplacian) {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 10 + trial;
    const SparseMatrix l = laplacian(testing::random_graph(n, 0.3, rng, true));
    const auto labeled = testing::random_subset(n, 1 + trial % (n - 1), rng);
    const LaplacianBlocks b = partition_laplacian(l, labeled);
    ASSERT_EQ(b.l + b.u, n);

    // Every labeled node lands in 0..l.
    for (Index i : labeled) EXPECT_LT(b.position[i], b.l);
    for (Index i = 0; i < n; ++i) EXPECT_EQ(b.order[b.position[i]], i);

    const Matrix dense = l.to_dense();
    Matrix reassembled(n, n);
    reassembled.topLeftCorner(b.l, b.l) = b.ll.to_dense();
    reassembled.bottomLeftCorner(b.u, b.l) = b.ul.to_dense();
    reassembled.topRightCorner(b.l, b.u) = b.ul.to_dense().transpose();
    reassembled.bottomRightCorner(b.u, b.u) = b.uu.to_dense();
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) EXPECT_EQ(reassembled(b.position[i], b.position[j]), dense(i, j));
    }
    EXPECT_EQ(b.permuted.to_dense(), reassembled);
    EXPECT_TRUE(b.uu.is_symmetric());
    // Gershgorin: diagonal dominates the off-diagonal row mass.
    const Matrix uu = b.uu.to_dense();
    for (Index i = 0; i < b.u; ++i) EXPECT_GE(2.0 * uu(i, i) - uu.row(i).cwiseAbs().sum(), -1e-12);

    const Matrix y = testing::gaussian(n, 3, rng);
    EXPECT_EQ(b.to_original(b.to_labeled_first(y)), y);
  }
}

TEST(QuadraticForm, ConstantRowsGiveZero) {
  Rng rng(50);
  const SparseMatrix l = laplacian(testing::random_graph(10, 0.4, rng, true));
  Matrix y(10, 3);
  y.rowwise() = Eigen::RowVector3d(0.2, -1.0, 3.0);
  EXPECT_NEAR(quadratic_form(l, y), 0.0, 1e-12);
}

TEST(QuadraticForm, TwoNodeIdentity) {
  const SparseMatrix l = laplacian(build_graph(std::vector<Edge>{{0, 1}}, 2));
  const Matrix y = Matrix::Identity(2, 2);
  EXPECT_DOUBLE_EQ(quadratic_form(l, y), 2.0);
  EXPECT_DOUBLE_EQ(testing::pairwise_sum(testing::DenseMatrix(l.to_dense()).cwiseMin(0.0).cwiseAbs(), y), 4.0);
}

TEST(QuadraticForm, DimensionMismatchThrows) {
  EXPECT_THROW(quadratic_form(laplacian(path3()), Matrix::Zero(2, 2)), InvalidArgument);
}

TEST(QuadraticFormProperty, HalfThePairwiseSum) {
  Rng rng(51);
  for (int trial = 0; trial < 50; ++trial) {
    const auto edges = testing::random_edges(15, 0.3, rng, true);
    const Graph g = build_graph(edges, 15);
    const Matrix y = testing::gaussian(15, 4, rng);
    const double pairwise = testing::pairwise_sum(testing::dense_adjacency(edges, 15), y);
    EXPECT_LE(std::abs(pairwise - 2.0 * quadratic_form(laplacian(g), y)), 1e-9 * std::max(1.0, pairwise));
  }
}

}  // namespace
}  // namespace mgcn
