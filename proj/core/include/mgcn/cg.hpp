#pragma once

#include <mgcn/sparse.hpp>

namespace mgcn {

struct CgOptions {
  /// Stop once ||b - Ax|| <= tolerance * ||b||.
  double tolerance = 1e-12;
  /// 0 means 10 * system size.
  Index max_iterations = 0;
};

struct CgResult {
  Index iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Solves (shift * I + scale * A) x = b for symmetric A with a Jacobi
/// preconditioner. `x` holds the initial guess on entry.
CgResult conjugate_gradient(const SparseMatrix& a, double shift, double scale, const Vector& b, Vector& x,
                            const CgOptions& options = {});

}  // namespace mgcn
