#include "mpcg/sparse_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mpcg/kernels.hpp"

namespace mpcg {

namespace {

// Native double CSR matvec, ascending column order per row.
void matvec_native(const CsrMatrix& a, const double* x, double* y) {
  for (int i = 0; i < a.n; ++i) {
    double acc = 0.0;
    for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      acc += a.values[k] * x[a.col_idx[k]];
    y[i] = acc;
  }
}

}  // namespace

DenseVector matvec_emulated(const CsrMatrix& a, const DenseVector& v,
                            const PrecisionFormat& fmt, EmulationMode mode) {
  if (a.n != static_cast<int>(v.size()))
    throw std::invalid_argument("matvec: dimension mismatch");
  DenseVector out(a.n);
  if (fmt.identity) {
    matvec_native(a, v.data(), out.data());
    return out;
  }
  if (mode == EmulationMode::Fast) {
    DenseVector va(a.values.size()), vr(v.size());
    kernels::round_array(a.values.data(), va.data(), va.size(), fmt);
    kernels::round_array(v.data(), vr.data(), vr.size(), fmt);
    for (int i = 0; i < a.n; ++i) {
      double acc = 0.0;
      for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
        acc += va[k] * vr[a.col_idx[k]];
      out[i] = round_scalar(acc, fmt);
    }
    return out;
  }
  // Strict: products are elementwise (staged through the SIMD kernel),
  // the running sum is a sequential chain of rounded additions.
  std::int64_t max_row = 0;
  for (int i = 0; i < a.n; ++i)
    max_row = std::max(max_row, a.row_ptr[i + 1] - a.row_ptr[i]);
  DenseVector stage(max_row);
  for (int i = 0; i < a.n; ++i) {
    const std::int64_t lo = a.row_ptr[i];
    const std::int64_t len = a.row_ptr[i + 1] - lo;
    kernels::gather_round_mul(a.values.data() + lo, a.col_idx.data() + lo,
                              v.data(), stage.data(), len, fmt);
    double acc = 0.0;
    for (std::int64_t k = 0; k < len; ++k)
      acc = round_scalar(acc + stage[k], fmt);
    out[i] = acc;
  }
  return out;
}

double dot_emulated(const DenseVector& u, const DenseVector& v,
                    const PrecisionFormat& fmt, EmulationMode mode) {
  if (u.size() != v.size())
    throw std::invalid_argument("dot: length mismatch");
  const std::size_t n = u.size();
  if (fmt.identity) return dot_fp64(u, v);
  constexpr std::size_t kChunk = 512;
  double stage[kChunk];
  double acc = 0.0;
  if (mode == EmulationMode::Fast) {
    double ru[kChunk], rv[kChunk];
    for (std::size_t i = 0; i < n; i += kChunk) {
      const std::size_t len = std::min(kChunk, n - i);
      kernels::round_array(u.data() + i, ru, len, fmt);
      kernels::round_array(v.data() + i, rv, len, fmt);
      for (std::size_t k = 0; k < len; ++k) acc += ru[k] * rv[k];
    }
    return round_scalar(acc, fmt);
  }
  for (std::size_t i = 0; i < n; i += kChunk) {
    const std::size_t len = std::min(kChunk, n - i);
    kernels::round_mul(u.data() + i, v.data() + i, stage, len, fmt);
    for (std::size_t k = 0; k < len; ++k)
      acc = round_scalar(acc + stage[k], fmt);
  }
  return acc;
}

DenseVector axpy_fp64(double alpha, const DenseVector& x,
                      const DenseVector& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("axpy: length mismatch");
  DenseVector out = y;
  kernels::axpy(alpha, x.data(), out.data(), out.size());
  return out;
}

double norm2_fp64(const DenseVector& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

double dot_fp64(const DenseVector& u, const DenseVector& v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
  return acc;
}

}  // namespace mpcg
