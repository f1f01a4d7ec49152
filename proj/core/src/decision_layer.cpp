#include <mgcn/decision_layer.hpp>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <iostream>
#include <string>

namespace mgcn {

namespace {

constexpr double kMonotonicitySlack = 1e-7;
constexpr Index kDenseFallbackLimit = 2000;
constexpr double kHarmonicRegularization = 1e-8;

std::string shape(const Matrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

// Solves (shift I + scale A) X = B column by column.
Matrix solve_columns(const SparseMatrix& a, double shift, double scale, const Matrix& rhs, const CgOptions& cg,
                     bool& all_converged) {
  Matrix out(rhs.rows(), rhs.cols());
  all_converged = true;
  for (Index j = 0; j < rhs.cols(); ++j) {
    const Vector b = rhs.col(j);
    Vector x = b;
    const CgResult res = conjugate_gradient(a, shift, scale, b, x, cg);
    all_converged = all_converged && res.converged;
    out.col(j) = x;
  }
  return out;
}

}  // namespace

Matrix LabelState::stacked() const {
  Matrix y(labeled.rows() + unlabeled.rows(), labeled.cols());
  y.topRows(labeled.rows()) = labeled;
  y.bottomRows(unlabeled.rows()) = unlabeled;
  return y;
}

Matrix trace_max_orthogonal(const Matrix& p) {
  if (p.cols() == 0) throw InvalidArgument("trace_max_orthogonal: P has no columns");
  if (p.rows() < p.cols()) throw InvalidArgument("trace_max_orthogonal: need rows >= cols, got " + shape(p));
  Eigen::JacobiSVD<Matrix> svd(p, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

Matrix orthonormal_complement(const Matrix& u) {
  const Index d = u.rows();
  const Index c = u.cols();
  if (c > d) throw InvalidArgument("orthonormal_complement: U is " + shape(u) + ", more columns than rows");
  if (c == d) return Matrix(d, 0);
  Eigen::HouseholderQR<Matrix> qr(u);
  const Matrix q = qr.householderQ();
  return q.rightCols(d - c);
}

ProjectionState random_projection(Index d, Index c, Rng& rng) {
  if (c < 1 || d < c) {
    throw InvalidArgument("random_projection: need 1 <= c <= d, got d=" + std::to_string(d) + " c=" + std::to_string(c));
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(d, c);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < c; ++j) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix q = qr.householderQ();
  return {q.leftCols(c), q.rightCols(d - c)};
}

ProjectionState update_projection(const Matrix& h, const Matrix& y, const Matrix& complement) {
  const Index d = h.cols();
  const Index c = y.cols();
  if (h.rows() != y.rows()) throw InvalidArgument("update_projection: H is " + shape(h) + " but Y is " + shape(y));
  if (c > d) throw InvalidArgument("update_projection: embedding width smaller than class count");
  if (complement.rows() != d || complement.cols() != d - c) {
    throw InvalidArgument("update_projection: complement must be " + std::to_string(d) + "x" +
                          std::to_string(d - c) + ", got " + shape(complement));
  }
  Matrix r(h.rows(), d);
  r.leftCols(c) = y;
  r.rightCols(d - c) = h * complement;
  const Matrix s = trace_max_orthogonal(h.transpose() * r);
  return {s.leftCols(c), s.rightCols(d - c)};
}

Matrix update_soft_labels(const Matrix& h_unlabeled, const Matrix& projector, const LaplacianBlocks& blocks,
                          const Matrix& y_labeled, double lambda, const CgOptions& cg) {
  if (!(lambda >= 0.0)) throw InvalidArgument("update_soft_labels: lambda must be >= 0");
  if (h_unlabeled.rows() != blocks.u || h_unlabeled.cols() != projector.rows()) {
    throw InvalidArgument("update_soft_labels: H_u is " + shape(h_unlabeled) + ", expected " +
                          std::to_string(blocks.u) + "x" + std::to_string(projector.rows()));
  }
  if (y_labeled.rows() != blocks.l || y_labeled.cols() != projector.cols()) {
    throw InvalidArgument("update_soft_labels: Y_l is " + shape(y_labeled) + ", expected " +
                          std::to_string(blocks.l) + "x" + std::to_string(projector.cols()));
  }
  Matrix rhs = h_unlabeled * projector;
  if (lambda != 0.0) rhs -= lambda * spmm(blocks.ul, y_labeled);

  bool converged = false;
  Matrix y_u = solve_columns(blocks.uu, 1.0, lambda, rhs, cg, converged);
  if (converged) return y_u;

  if (blocks.u > kDenseFallbackLimit) {
    throw NumericError("update_soft_labels: conjugate gradient did not converge (u = " + std::to_string(blocks.u) +
                       ", lambda = " + std::to_string(lambda) + ")");
  }
  Matrix system = lambda * blocks.uu.to_dense();
  system.diagonal().array() += 1.0;
  const Eigen::LLT<Matrix> llt(system);
  if (llt.info() != Eigen::Success) throw NumericError("update_soft_labels: I + lambda L_uu is not positive definite");
  return llt.solve(rhs);
}

double objective(const Matrix& h, const Matrix& projector, const Matrix& y, const SparseMatrix& lap, double lambda) {
  if (h.rows() != y.rows() || h.cols() != projector.rows() || projector.cols() != y.cols()) {
    throw InvalidArgument("objective: H " + shape(h) + ", U " + shape(projector) + ", Y " + shape(y) +
                          " are inconsistent");
  }
  const double fit = (h * projector - y).squaredNorm();
  return lambda == 0.0 ? fit : fit + lambda * quadratic_form(lap, y);
}

double objective(const Matrix& h, const Matrix& projector, const Matrix& y_labeled, const Matrix& y_unlabeled,
                 const LaplacianBlocks& blocks, double lambda) {
  return objective(h, projector, LabelState{y_labeled, y_unlabeled}.stacked(), blocks.permuted, lambda);
}

DecisionSolution solve(const Matrix& h, const Matrix& y_labeled, const LaplacianBlocks& blocks,
                       const DecisionOptions& options, Rng& rng, const DecisionSolution* warm_start) {
  const Index d = h.cols();
  const Index c = y_labeled.cols();
  if (h.rows() != blocks.l + blocks.u) throw InvalidArgument("solve: H rows do not match the Laplacian blocks");
  if (y_labeled.rows() != blocks.l) throw InvalidArgument("solve: Y_l rows do not match the labeled count");
  if (c > d) {
    throw InvalidArgument("solve: embedding width " + std::to_string(d) + " is below the class count " +
                          std::to_string(c));
  }
  if (options.max_iterations < 1) throw InvalidArgument("solve: max_iterations must be >= 1");

  DecisionSolution sol;
  sol.labels.labeled = y_labeled;
  if (warm_start != nullptr) {
    if (warm_start->projection.projector.rows() != d || warm_start->projection.projector.cols() != c ||
        warm_start->labels.unlabeled.rows() != blocks.u) {
      throw InvalidArgument("solve: warm start does not match the problem shape");
    }
    sol.projection = warm_start->projection;
    sol.labels.unlabeled = warm_start->labels.unlabeled;
  } else {
    sol.projection = random_projection(d, c, rng);
    if (options.random_label_init) {
      std::exponential_distribution<double> expo(1.0);
      sol.labels.unlabeled.resize(blocks.u, c);
      for (Index i = 0; i < blocks.u; ++i) {
        for (Index j = 0; j < c; ++j) sol.labels.unlabeled(i, j) = expo(rng);
        sol.labels.unlabeled.row(i) /= sol.labels.unlabeled.row(i).sum();
      }
    } else {
      sol.labels.unlabeled = Matrix::Constant(blocks.u, c, 1.0 / static_cast<double>(c));
    }
  }

  const Matrix h_unlabeled = h.bottomRows(blocks.u);
  double previous = objective(h, sol.projection.projector, y_labeled, sol.labels.unlabeled, blocks, options.lambda);
  sol.objective_trace.push_back(previous);

  for (Index it = 1; it <= options.max_iterations; ++it) {
    sol.projection = update_projection(h, sol.labels.stacked(), sol.projection.complement);
    sol.labels.unlabeled =
        update_soft_labels(h_unlabeled, sol.projection.projector, blocks, y_labeled, options.lambda, options.cg);
    const double current =
        objective(h, sol.projection.projector, y_labeled, sol.labels.unlabeled, blocks, options.lambda);
    if (!std::isfinite(current)) throw NumericError("solve: objective became non-finite");
    sol.objective_trace.push_back(current);
    sol.inner_iterations = it;
    if (current > previous + kMonotonicitySlack) {
      ++sol.monotonicity_violations;
      std::clog << "mgcn: decision objective rose from " << previous << " to " << current << " at inner iteration "
                << it << '\n';
    }
    if (std::abs(current - previous) / std::max(1.0, previous) < options.tolerance) {
      sol.converged = true;
      break;
    }
    previous = current;
  }
  sol.objective = sol.objective_trace.back();
  return sol;
}

Matrix embedding_gradient(const Matrix& h, const Matrix& projector, const Matrix& y) {
  if (h.rows() != y.rows() || h.cols() != projector.rows() || projector.cols() != y.cols()) {
    throw InvalidArgument("embedding_gradient: H " + shape(h) + ", U " + shape(projector) + ", Y " + shape(y) +
                          " are inconsistent");
  }
  return 2.0 * (h * projector - y) * projector.transpose();
}

Matrix harmonic_propagation(const LaplacianBlocks& blocks, const Matrix& y_labeled, const CgOptions& cg) {
  if (y_labeled.rows() != blocks.l) throw InvalidArgument("harmonic_propagation: Y_l rows do not match l");
  const Matrix rhs = -spmm(blocks.ul, y_labeled);

  bool converged = false;
  if ((blocks.uu.diagonal().array() > 0.0).all()) {
    Matrix y_u = solve_columns(blocks.uu, 0.0, 1.0, rhs, cg, converged);
    if (converged) return y_u;
  }
  Matrix y_u = solve_columns(blocks.uu, kHarmonicRegularization, 1.0, rhs, cg, converged);
  if (!converged) throw NumericError("harmonic_propagation: L_uu singular even after regularisation");
  return y_u;
}

Matrix one_hot(std::span<const int> classes, Index num_classes) {
  Matrix y = Matrix::Zero(static_cast<Index>(classes.size()), num_classes);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i] < 0 || classes[i] >= num_classes) throw InvalidArgument("one_hot: class index out of range");
    y(static_cast<Index>(i), classes[i]) = 1.0;
  }
  return y;
}

std::vector<int> argmax_rows(const Matrix& scores) {
  std::vector<int> out(static_cast<std::size_t>(scores.rows()), 0);
  for (Index i = 0; i < scores.rows(); ++i) {
    int best = 0;
    for (Index j = 1; j < scores.cols(); ++j) {
      if (scores(i, j) > scores(i, best)) best = static_cast<int>(j);
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

}  // namespace mgcn
