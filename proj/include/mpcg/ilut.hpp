#pragma once

#include "mpcg/csr.hpp"
#include "mpcg/precision.hpp"

namespace mpcg {

/// Incomplete LU factors M = L*U approximating A.
///
/// L is unit lower triangular with its 1.0 diagonal stored explicitly;
/// U is upper triangular with nonzero diagonal. Every stored value is a
/// fixed point of round_scalar(., storage_fmt), and
/// nnz(L) + nnz(U) <= fill_factor * nnz(A) + 2n.
struct IlutFactors {
  CsrMatrix lower;
  CsrMatrix upper;
  FormatTag storage_fmt = FormatTag::fp32;
  double drop_tol = 0.0;
  double fill_factor = 0.0;
  bool from_jacobi_fallback = false;
};

/// Row-wise ILUT(tau, p) with dual dropping: entries below
/// drop_tol * ||row||_2 are discarded, and each factor keeps at most
/// floor(fill_factor * row_nnz / 2) + 1 largest-magnitude entries per
/// row (diagonals always kept). Kept values are rounded to storage_fmt.
/// Throws ZeroPivot(i) when |U_ii| < 1e-14 * max|A| after dropping.
IlutFactors ilut_factor(const CsrMatrix& a, double drop_tol,
                        double fill_factor, FormatTag storage_fmt);

/// Applies M^-1 r via forward then backward triangular solves at the
/// requested precision. Strict mode rounds every multiply, subtract and
/// divide; Fast rounds the inputs, solves in double and rounds the
/// result. NaN/inf propagate to the caller's breakdown detection.
DenseVector apply_precond(const IlutFactors& m, const DenseVector& r,
                          const PrecisionFormat& fmt, EmulationMode mode);

/// Diagonal (Jacobi) preconditioner packaged as ILUT factors: L = I,
/// U = diag(A) rounded to fp32. Throws ZeroDiagonal if any A_ii == 0.
IlutFactors jacobi_fallback(const CsrMatrix& a);

/// ilut_factor with automatic Jacobi fallback on ZeroPivot.
IlutFactors ilut_or_jacobi(const CsrMatrix& a, double drop_tol,
                           double fill_factor, FormatTag storage_fmt);

}  // namespace mpcg
