#pragma once

#include <mgcn/cg.hpp>
#include <mgcn/graph.hpp>

#include <optional>
#include <span>
#include <vector>

namespace mgcn {

/// Orthonormal projector U (d x c) and an orthonormal basis V (d x (d - c))
/// of its orthogonal complement.
struct ProjectionState {
  Matrix projector;
  Matrix complement;
};

/// Y_l is one-hot (l x c); Y_u holds real-valued scores (u x c). Row order
/// follows the LaplacianBlocks the state was solved against.
struct LabelState {
  Matrix labeled;
  Matrix unlabeled;

  /// [Y_l; Y_u] in labeled-first order.
  Matrix stacked() const;
};

struct DecisionOptions {
  double lambda = 1.0;
  /// Relative objective change that ends the alternation.
  double tolerance = 1e-4;
  Index max_iterations = 30;
  /// Start Y_u from random simplex rows instead of uniform 1/c rows.
  bool random_label_init = false;
  CgOptions cg{};
};

struct DecisionSolution {
  ProjectionState projection;
  LabelState labels;
  double objective = 0.0;
  Index inner_iterations = 0;
  bool converged = false;
  /// Objective before the first iteration followed by one value per iteration.
  std::vector<double> objective_trace;
  /// Steps whose objective rose by more than 1e-7.
  Index monotonicity_violations = 0;
};

/// Orthonormal Q (m x n, m >= n) maximising Tr(Q^T P), built as Q = B C^T
/// from the thin SVD P = B S C^T. The maximum equals the nuclear norm of P.
Matrix trace_max_orthogonal(const Matrix& p);

/// Orthonormal basis of the complement of span(U). Returns d x 0 when U is square.
Matrix orthonormal_complement(const Matrix& u);

/// Gaussian d x c matrix orthonormalised by QR, plus its complement.
ProjectionState random_projection(Index d, Index c, Rng& rng);

/// One closed-form projection step for min ||H U - Y||_F^2 over U^T U = I.
///
/// With R = [Y, H V] the balanced problem max Tr(S^T H^T R) over square
/// orthogonal S is solved by trace_max_orthogonal(H^T R); U is the first c
/// columns of S and the remaining columns become the next complement.
ProjectionState update_projection(const Matrix& h, const Matrix& y, const Matrix& complement);

/// Unique minimiser over Y_u of ||H U - [Y_l; Y_u]||^2 + lambda Tr(Y^T L Y):
/// solves (I + lambda L_uu) Y_u = H_u U - lambda L_ul Y_l column by column.
/// CG failure falls back to a dense Cholesky solve for u <= 2000.
Matrix update_soft_labels(const Matrix& h_unlabeled, const Matrix& projector, const LaplacianBlocks& blocks,
                          const Matrix& y_labeled, double lambda, const CgOptions& cg = {});

/// ||H U - Y||_F^2 + lambda Tr(Y^T L Y) with H, Y, L in the same row order.
double objective(const Matrix& h, const Matrix& projector, const Matrix& y, const SparseMatrix& lap, double lambda);

/// Same objective evaluated from the labeled-first blocks.
double objective(const Matrix& h, const Matrix& projector, const Matrix& y_labeled, const Matrix& y_unlabeled,
                 const LaplacianBlocks& blocks, double lambda);

/// Alternates update_projection and update_soft_labels until the relative
/// objective change drops below options.tolerance. `h` is labeled-first.
/// A warm start reuses its projector, complement and Y_u.
DecisionSolution solve(const Matrix& h, const Matrix& y_labeled, const LaplacianBlocks& blocks,
                       const DecisionOptions& options, Rng& rng, const DecisionSolution* warm_start = nullptr);

/// d/dH ||H U - Y||_F^2 = 2 (H U - Y) U^T.
Matrix embedding_gradient(const Matrix& h, const Matrix& projector, const Matrix& y);

/// Harmonic solution L_uu Y_u = -L_ul Y_l. Retries with L_uu + 1e-8 I when
/// the plain system does not converge.
Matrix harmonic_propagation(const LaplacianBlocks& blocks, const Matrix& y_labeled, const CgOptions& cg = {});

/// l x c one-hot rows for the given class indices.
Matrix one_hot(std::span<const int> classes, Index num_classes);

/// Row-wise argmax; ties go to the lowest class index.
std::vector<int> argmax_rows(const Matrix& scores);

}  // namespace mgcn
