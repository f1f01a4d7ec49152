#include <mgcn/cg.hpp>

#include <cmath>

namespace mgcn {

CgResult conjugate_gradient(const SparseMatrix& a, double shift, double scale, const Vector& b, Vector& x,
                            const CgOptions& options) {
  const Index n = a.rows();
  if (a.cols() != n || b.size() != n) throw InvalidArgument("conjugate_gradient: dimension mismatch");
  if (x.size() != n) x = Vector::Zero(n);

  const auto apply = [&](const Vector& v) -> Vector { return shift * v + scale * spmv(a, v); };

  Vector inv_diag = (shift + scale * a.diagonal().array()).matrix();
  for (Index i = 0; i < n; ++i) {
    if (!(inv_diag[i] > 0.0)) throw NumericError("conjugate_gradient: operator diagonal is not positive");
    inv_diag[i] = 1.0 / inv_diag[i];
  }

  CgResult result;
  const double b_norm = b.norm();
  if (b_norm == 0.0) {
    x.setZero();
    result.converged = true;
    return result;
  }
  const Index cap = options.max_iterations > 0 ? options.max_iterations : 10 * n;

  Vector r = b - apply(x);
  Vector z = inv_diag.cwiseProduct(r);
  Vector p = z;
  double rz = r.dot(z);
  result.relative_residual = r.norm() / b_norm;

  while (result.relative_residual > options.tolerance && result.iterations < cap) {
    const Vector ap = apply(p);
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) break;  // operator not positive definite along p
    const double alpha = rz / pap;
    x.noalias() += alpha * p;
    r.noalias() -= alpha * ap;
    ++result.iterations;
    result.relative_residual = r.norm() / b_norm;
    z = inv_diag.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  if (!std::isfinite(result.relative_residual)) throw NumericError("conjugate_gradient: non-finite residual");
  result.converged = result.relative_residual <= options.tolerance;
  return result;
}

}  // namespace mgcn
