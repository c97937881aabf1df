// Test-only oracles: independent evaluation routes used to freeze
// expected values. Nothing here may call the implementation paths it
// checks.
#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "mpcg/csr.hpp"
#include "mpcg/precision.hpp"
#include "mpcg/rng.hpp"

namespace oracles {

inline std::uint64_t bits(double x) { return std::bit_cast<std::uint64_t>(x); }

// Scaled-rounding oracle for round_scalar: frexp + nearbyint on the
// binade grid instead of bit manipulation.
inline double round_oracle(double x, const mpcg::PrecisionFormat& f) {
  if (f.identity) return x;
  if (std::isnan(x) || std::isinf(x)) return x;
  if (x == 0.0) return x;
  int e = 0;
  std::frexp(std::fabs(x), &e);
  const int exp = e - 1;  // |x| in [2^exp, 2^(exp+1))
  if (exp < f.min_exp) {
    const double q = std::ldexp(1.0, f.min_exp - f.sig_bits + 1);
    return std::nearbyint(x / q) * q;
  }
  const double q = std::ldexp(1.0, exp - f.sig_bits + 1);
  const double y = std::nearbyint(x / q) * q;
  if (std::fabs(y) > f.max_value)
    return std::copysign(std::numeric_limits<double>::infinity(), x);
  return y;
}

// Representable neighbors of 1.0 in a format, by direct grid
// construction: ulp below 1 is 2^-t+1... below uses the lower binade.
inline std::vector<double> grid_around_one(const mpcg::PrecisionFormat& f) {
  const double ulp_above = std::ldexp(1.0, 1 - f.sig_bits);
  const double ulp_below = std::ldexp(1.0, -f.sig_bits);
  return {1.0 - 2.0 * ulp_below, 1.0 - ulp_below, 1.0, 1.0 + ulp_above,
          1.0 + 2.0 * ulp_above};
}

// Plain double CSR matvec in index order.
inline mpcg::DenseVector matvec_plain(const mpcg::CsrMatrix& a,
                                      const mpcg::DenseVector& v) {
  mpcg::DenseVector y(a.n);
  for (int i = 0; i < a.n; ++i) {
    double acc = 0.0;
    for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      acc += a.values[k] * v[a.col_idx[k]];
    y[i] = acc;
  }
  return y;
}

// Transposed evaluation: y = A' u accumulated by scattering row entries,
// which visits each output's contributions in the same order a gather
// over the symmetric partner row would.
inline mpcg::DenseVector matvec_transposed_scatter(const mpcg::CsrMatrix& a,
                                                   const mpcg::DenseVector& u) {
  mpcg::DenseVector y(a.n, 0.0);
  for (int i = 0; i < a.n; ++i)
    for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      y[a.col_idx[k]] += a.values[k] * u[i];
  return y;
}

inline double dot_plain(const mpcg::DenseVector& u, const mpcg::DenseVector& v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
  return acc;
}

// Dense LU without pivoting (Doolittle), for factor comparisons on tiny
// well-behaved matrices. Returns row-major L (unit diag) and U.
struct DenseLuFactors {
  int n;
  std::vector<double> l;
  std::vector<double> u;
};

inline DenseLuFactors dense_lu_nopivot(const mpcg::CsrMatrix& a) {
  const int n = a.n;
  DenseLuFactors f{n, std::vector<double>(std::size_t(n) * n, 0.0),
                   std::vector<double>(std::size_t(n) * n, 0.0)};
  std::vector<double> m(std::size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      m[std::size_t(i) * n + a.col_idx[k]] = a.values[k];
  for (int k = 0; k < n; ++k) {
    for (int j = k; j < n; ++j) f.u[std::size_t(k) * n + j] = m[std::size_t(k) * n + j];
    f.l[std::size_t(k) * n + k] = 1.0;
    for (int i = k + 1; i < n; ++i) {
      const double lik = m[std::size_t(i) * n + k] / m[std::size_t(k) * n + k];
      f.l[std::size_t(i) * n + k] = lik;
      for (int j = k; j < n; ++j)
        m[std::size_t(i) * n + j] -= lik * m[std::size_t(k) * n + j];
    }
  }
  return f;
}

// Brute-force Kronecker-sum assembly of the nx x ny five-point Laplacian
// with unit spacings: A = I (x) T + T (x) I, T = tridiag(-1, 2, -1).
inline mpcg::CsrMatrix kronecker_poisson(int nx, int ny) {
  const int n = nx * ny;
  std::vector<mpcg::Triplet> trips;
  auto t_entry = [](int i, int j) -> double {
    if (i == j) return 2.0;
    if (std::abs(i - j) == 1) return -1.0;
    return 0.0;
  };
  for (int jy = 0; jy < ny; ++jy)
    for (int jx = 0; jx < nx; ++jx)
      for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
          double v = 0.0;
          if (iy == jy) v += t_entry(ix, jx);
          if (ix == jx) v += t_entry(iy, jy);
          if (v != 0.0)
            trips.push_back({jy * nx + jx, iy * nx + ix, v});
        }
  return mpcg::csr_from_triplets(n, std::move(trips));
}

// Cyclic Jacobi eigenvalue iteration for small dense symmetric matrices;
// returns the smallest eigenvalue.
inline double smallest_eigenvalue(const mpcg::CsrMatrix& a) {
  const int n = a.n;
  std::vector<double> m(std::size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      m[std::size_t(i) * n + a.col_idx[k]] = a.values[k];
  auto at = [&](int i, int j) -> double& { return m[std::size_t(i) * n + j]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += at(p, q) * at(p, q);
    if (off < 1e-24) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (at(p, q) == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
        const double t = std::copysign(1.0, theta) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int i = 0; i < n; ++i) {
          const double mip = at(i, p), miq = at(i, q);
          at(i, p) = c * mip - s * miq;
          at(i, q) = s * mip + c * miq;
        }
        for (int i = 0; i < n; ++i) {
          const double mpi = at(p, i), mqi = at(q, i);
          at(p, i) = c * mpi - s * mqi;
          at(q, i) = s * mpi + c * mqi;
        }
      }
  }
  double lo = at(0, 0);
  for (int i = 1; i < n; ++i) lo = std::min(lo, at(i, i));
  return lo;
}

// Random doubles with a wide, format-exercising exponent spread.
inline double random_wide_double(mpcg::Rng& rng) {
  const double mag = std::ldexp(rng.uniform(1.0, 2.0),
                                static_cast<int>(rng.uniform_index(260)) - 140);
  return rng.uniform() < 0.5 ? -mag : mag;
}

inline mpcg::DenseVector random_vector(mpcg::Rng& rng, int n, double lo = -2.0,
                                       double hi = 2.0) {
  mpcg::DenseVector v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

}  // namespace oracles
