#include "mpcg/kernels.hpp"
#include "mpcg/precision.hpp"

namespace mpcg::kernels::scalar {

void round_array(const double* src, double* dst, std::size_t n,
                 const PrecisionFormat& f) {
  if (f.identity) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = src[i];
    return;
  }
  for (std::size_t i = 0; i < n; ++i) dst[i] = round_scalar(src[i], f);
}

void round_mul(const double* u, const double* v, double* dst, std::size_t n,
               const PrecisionFormat& f) {
  if (f.identity) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = u[i] * v[i];
    return;
  }
  for (std::size_t i = 0; i < n; ++i)
    dst[i] = round_scalar(round_scalar(u[i], f) * round_scalar(v[i], f), f);
}

void gather_round_mul(const double* vals, const std::int32_t* idx,
                      const double* x, double* dst, std::size_t n,
                      const PrecisionFormat& f) {
  if (f.identity) {
    for (std::size_t k = 0; k < n; ++k) dst[k] = vals[k] * x[idx[k]];
    return;
  }
  for (std::size_t k = 0; k < n; ++k)
    dst[k] =
        round_scalar(round_scalar(vals[k], f) * round_scalar(x[idx[k]], f), f);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void xpay(const double* z, double b, double* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + b * p[i];
}

}  // namespace mpcg::kernels::scalar
