#pragma once

#include "mpcg/csr.hpp"
#include "mpcg/precision.hpp"

namespace mpcg {

/// Sparse matrix-vector product with emulated precision.
///
/// Strict mode rounds matrix entries, vector entries, every product and
/// every running row-sum into fmt; Fast mode rounds the operands, runs
/// the row dot products in double and rounds the result. Row sums
/// accumulate in ascending column order in both modes, so fp64 results
/// match the native double kernel bit for bit. Overflow propagates as
/// +-inf, invalid operations as NaN.
DenseVector matvec_emulated(const CsrMatrix& a, const DenseVector& v,
                            const PrecisionFormat& fmt, EmulationMode mode);

/// Inner product with emulated precision; fixed left-to-right
/// accumulation in index order.
double dot_emulated(const DenseVector& u, const DenseVector& v,
                    const PrecisionFormat& fmt, EmulationMode mode);

/// y + alpha * x in native double.
DenseVector axpy_fp64(double alpha, const DenseVector& x,
                      const DenseVector& y);

/// Euclidean norm in native double, sequential accumulation.
double norm2_fp64(const DenseVector& v);

/// Plain double dot product in index order.
double dot_fp64(const DenseVector& u, const DenseVector& v);

/// Solves A x = b by direct factorization, used only to produce
/// reference solutions. Dense LU with partial pivoting by default; a
/// banded Cholesky fast path handles narrow-band SPD systems. A couple
/// of double-precision refinement steps polish the residual. Throws
/// SingularMatrix when a pivot falls below 1e-14 * max|A|.
DenseVector direct_solve(const CsrMatrix& a, const DenseVector& b);

}  // namespace mpcg
