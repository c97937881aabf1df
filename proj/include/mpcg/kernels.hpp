#pragma once

#include <cstddef>
#include <cstdint>

namespace mpcg {

struct PrecisionFormat;

namespace kernels {

/// Kernel backends. The scalar backend is the reference; SIMD variants
/// must produce bit-identical results and are selected at startup based
/// on CPU support.
enum class Backend { Scalar, Avx2 };

Backend active_backend();
const char* to_string(Backend b);

/// Forces a backend; returns false (leaving the dispatch unchanged) if
/// the requested backend is unavailable on this machine.
bool set_backend(Backend b);

bool avx2_compiled();
bool avx2_supported();

// Dispatched entry points.

/// dst[i] = round(src[i]) into format f.
void round_array(const double* src, double* dst, std::size_t n,
                 const PrecisionFormat& f);

/// dst[i] = round(round(u[i]) * round(v[i])) into format f.
void round_mul(const double* u, const double* v, double* dst, std::size_t n,
               const PrecisionFormat& f);

/// dst[k] = round(round(vals[k]) * round(x[idx[k]])) into format f.
void gather_round_mul(const double* vals, const std::int32_t* idx,
                      const double* x, double* dst, std::size_t n,
                      const PrecisionFormat& f);

/// y[i] += a * x[i] in native double.
void axpy(double a, const double* x, double* y, std::size_t n);

/// p[i] = z[i] + b * p[i] in native double.
void xpay(const double* z, double b, double* p, std::size_t n);

// Per-backend implementations, exposed for equivalence testing.
namespace scalar {
void round_array(const double* src, double* dst, std::size_t n,
                 const PrecisionFormat& f);
void round_mul(const double* u, const double* v, double* dst, std::size_t n,
               const PrecisionFormat& f);
void gather_round_mul(const double* vals, const std::int32_t* idx,
                      const double* x, double* dst, std::size_t n,
                      const PrecisionFormat& f);
void axpy(double a, const double* x, double* y, std::size_t n);
void xpay(const double* z, double b, double* p, std::size_t n);
}  // namespace scalar

#ifdef MPCG_HAVE_AVX2
namespace avx2 {
void round_array(const double* src, double* dst, std::size_t n,
                 const PrecisionFormat& f);
void round_mul(const double* u, const double* v, double* dst, std::size_t n,
               const PrecisionFormat& f);
void gather_round_mul(const double* vals, const std::int32_t* idx,
                      const double* x, double* dst, std::size_t n,
                      const PrecisionFormat& f);
void axpy(double a, const double* x, double* y, std::size_t n);
void xpay(const double* z, double b, double* p, std::size_t n);
}  // namespace avx2
#endif

}  // namespace kernels
}  // namespace mpcg
