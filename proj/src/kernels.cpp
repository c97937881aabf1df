#include "mpcg/kernels.hpp"

#include "mpcg/precision.hpp"

namespace mpcg::kernels {

namespace {

struct KernelTable {
  void (*round_array)(const double*, double*, std::size_t,
                      const PrecisionFormat&);
  void (*round_mul)(const double*, const double*, double*, std::size_t,
                    const PrecisionFormat&);
  void (*gather_round_mul)(const double*, const std::int32_t*, const double*,
                           double*, std::size_t, const PrecisionFormat&);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*xpay)(const double*, double, double*, std::size_t);
};

constexpr KernelTable kScalarTable = {scalar::round_array, scalar::round_mul,
                                      scalar::gather_round_mul, scalar::axpy,
                                      scalar::xpay};

#ifdef MPCG_HAVE_AVX2
constexpr KernelTable kAvx2Table = {avx2::round_array, avx2::round_mul,
                                    avx2::gather_round_mul, avx2::axpy,
                                    avx2::xpay};
#endif

bool detect_avx2() {
#if defined(MPCG_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

struct Dispatch {
  Backend backend;
  const KernelTable* table;
  Dispatch() {
    if (detect_avx2()) {
#ifdef MPCG_HAVE_AVX2
      backend = Backend::Avx2;
      table = &kAvx2Table;
      return;
#endif
    }
    backend = Backend::Scalar;
    table = &kScalarTable;
  }
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

}  // namespace

Backend active_backend() { return dispatch().backend; }

const char* to_string(Backend b) {
  return b == Backend::Avx2 ? "avx2" : "scalar";
}

bool avx2_compiled() {
#ifdef MPCG_HAVE_AVX2
  return true;
#else
  return false;
#endif
}

bool avx2_supported() { return detect_avx2(); }

bool set_backend(Backend b) {
  if (b == Backend::Scalar) {
    dispatch().backend = Backend::Scalar;
    dispatch().table = &kScalarTable;
    return true;
  }
#ifdef MPCG_HAVE_AVX2
  if (detect_avx2()) {
    dispatch().backend = Backend::Avx2;
    dispatch().table = &kAvx2Table;
    return true;
  }
#endif
  return false;
}

void round_array(const double* src, double* dst, std::size_t n,
                 const PrecisionFormat& f) {
  dispatch().table->round_array(src, dst, n, f);
}

void round_mul(const double* u, const double* v, double* dst, std::size_t n,
               const PrecisionFormat& f) {
  dispatch().table->round_mul(u, v, dst, n, f);
}

void gather_round_mul(const double* vals, const std::int32_t* idx,
                      const double* x, double* dst, std::size_t n,
                      const PrecisionFormat& f) {
  dispatch().table->gather_round_mul(vals, idx, x, dst, n, f);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  dispatch().table->axpy(a, x, y, n);
}

void xpay(const double* z, double b, double* p, std::size_t n) {
  dispatch().table->xpay(z, b, p, n);
}

}  // namespace mpcg::kernels
