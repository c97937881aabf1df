// AVX2 variants of the hot elementwise kernels. Each one must produce
// bit-identical output to the scalar reference in kernels_scalar.cpp;
// the equivalence suite in tests/test_kernels.cpp enforces that.

#ifdef MPCG_HAVE_AVX2

#include <immintrin.h>

#include <limits>

#include "mpcg/kernels.hpp"
#include "mpcg/precision.hpp"

namespace mpcg::kernels::avx2 {

namespace {

constexpr long long kAbsMask = 0x7fffffffffffffffll;
constexpr long long kSignMask = static_cast<long long>(0x8000000000000000ull);
constexpr long long kMaxFinite = 0x7fefffffffffffffll;

// Lanewise round-to-nearest-even into the target format; mirrors
// round_scalar() exactly (same operations, same special handling).
inline __m256d round_lanes(__m256d v, const PrecisionFormat& f) {
  const __m256i bits = _mm256_castpd_si256(v);
  const __m256i abs_mask = _mm256_set1_epi64x(kAbsMask);
  const __m256i abs_bits = _mm256_and_si256(bits, abs_mask);
  const __m256i special =
      _mm256_cmpgt_epi64(abs_bits, _mm256_set1_epi64x(kMaxFinite));

  // Normal range: integer round-and-truncate on the significand.
  const __m128i shift = _mm_cvtsi32_si128(f.shift);
  const __m256i lsb = _mm256_and_si256(_mm256_srl_epi64(bits, shift),
                                       _mm256_set1_epi64x(1));
  __m256i r = _mm256_add_epi64(
      bits, _mm256_add_epi64(
                _mm256_set1_epi64x(static_cast<long long>(f.round_add)), lsb));
  r = _mm256_and_si256(r, _mm256_set1_epi64x(static_cast<long long>(f.keep_mask)));
  __m256d y_norm = _mm256_castsi256_pd(r);

  const __m256d abs_pd = _mm256_castsi256_pd(abs_mask);
  const __m256d ovf = _mm256_cmp_pd(_mm256_and_pd(y_norm, abs_pd),
                                    _mm256_set1_pd(f.max_value), _CMP_GT_OQ);
  const __m256d signed_inf = _mm256_or_pd(
      _mm256_andnot_pd(abs_pd, v),
      _mm256_set1_pd(std::numeric_limits<double>::infinity()));
  y_norm = _mm256_blendv_pd(y_norm, signed_inf, ovf);

  // Below the normal range: quantize onto the subnormal grid.
  __m256d y_sub = _mm256_mul_pd(v, _mm256_set1_pd(f.sub_scale_up));
  y_sub = _mm256_round_pd(y_sub, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  y_sub = _mm256_mul_pd(y_sub, _mm256_set1_pd(f.sub_scale_down));

  const __m256d below = _mm256_cmp_pd(_mm256_and_pd(v, abs_pd),
                                      _mm256_set1_pd(f.min_normal), _CMP_LT_OQ);
  __m256d y = _mm256_blendv_pd(y_norm, y_sub, below);
  return _mm256_blendv_pd(y, v, _mm256_castsi256_pd(special));
}

}  // namespace

void round_array(const double* src, double* dst, std::size_t n,
                 const PrecisionFormat& f) {
  if (f.identity) {
    scalar::round_array(src, dst, n, f);
    return;
  }
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(dst + i, round_lanes(_mm256_loadu_pd(src + i), f));
  scalar::round_array(src + i, dst + i, n - i, f);
}

void round_mul(const double* u, const double* v, double* dst, std::size_t n,
               const PrecisionFormat& f) {
  std::size_t i = 0;
  if (f.identity) {
    for (; i + 4 <= n; i += 4)
      _mm256_storeu_pd(
          dst + i, _mm256_mul_pd(_mm256_loadu_pd(u + i), _mm256_loadu_pd(v + i)));
  } else {
    for (; i + 4 <= n; i += 4) {
      const __m256d ru = round_lanes(_mm256_loadu_pd(u + i), f);
      const __m256d rv = round_lanes(_mm256_loadu_pd(v + i), f);
      _mm256_storeu_pd(dst + i, round_lanes(_mm256_mul_pd(ru, rv), f));
    }
  }
  scalar::round_mul(u + i, v + i, dst + i, n - i, f);
}

void gather_round_mul(const double* vals, const std::int32_t* idx,
                      const double* x, double* dst, std::size_t n,
                      const PrecisionFormat& f) {
  std::size_t k = 0;
  if (f.identity) {
    for (; k + 4 <= n; k += 4) {
      const __m128i ix =
          _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + k));
      const __m256d xv = _mm256_i32gather_pd(x, ix, 8);
      _mm256_storeu_pd(dst + k, _mm256_mul_pd(_mm256_loadu_pd(vals + k), xv));
    }
  } else {
    for (; k + 4 <= n; k += 4) {
      const __m128i ix =
          _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + k));
      const __m256d xv = round_lanes(_mm256_i32gather_pd(x, ix, 8), f);
      const __m256d av = round_lanes(_mm256_loadu_pd(vals + k), f);
      _mm256_storeu_pd(dst + k, round_lanes(_mm256_mul_pd(av, xv), f));
    }
  }
  scalar::gather_round_mul(vals + k, idx + k, x, dst + k, n - k, f);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_mul_pd(av, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), t));
  }
  scalar::axpy(a, x + i, y + i, n - i);
}

void xpay(const double* z, double b, double* p, std::size_t n) {
  const __m256d bv = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_mul_pd(bv, _mm256_loadu_pd(p + i));
    _mm256_storeu_pd(p + i, _mm256_add_pd(_mm256_loadu_pd(z + i), t));
  }
  scalar::xpay(z + i, b, p + i, n - i);
}

}  // namespace mpcg::kernels::avx2

#endif  // MPCG_HAVE_AVX2
