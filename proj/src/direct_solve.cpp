#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "mpcg/errors.hpp"
#include "mpcg/sparse_kernels.hpp"

namespace mpcg {

namespace {

constexpr double kPivotRel = 1e-14;

// Dense LU with partial pivoting, factorization stored in place.
struct DenseLu {
  int n;
  std::vector<double> lu;    // row-major n x n
  std::vector<int> perm;

  void solve(const double* b, double* x) const {
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
      double s = b[perm[i]];
      for (int j = 0; j < i; ++j) s -= lu[i * std::size_t(n) + j] * y[j];
      y[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = y[i];
      for (int j = i + 1; j < n; ++j) s -= lu[i * std::size_t(n) + j] * x[j];
      x[i] = s / lu[i * std::size_t(n) + i];
    }
  }
};

DenseLu factor_dense(const CsrMatrix& a, double pivot_floor) {
  const int n = a.n;
  DenseLu f;
  f.n = n;
  f.lu.assign(std::size_t(n) * n, 0.0);
  f.perm.resize(n);
  for (int i = 0; i < n; ++i) {
    f.perm[i] = i;
    for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      f.lu[std::size_t(i) * n + a.col_idx[k]] = a.values[k];
  }
  auto* m = f.lu.data();
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::fabs(m[std::size_t(k) * n + k]);
    for (int i = k + 1; i < n; ++i) {
      const double c = std::fabs(m[std::size_t(i) * n + k]);
      if (c > best) {
        best = c;
        piv = i;
      }
    }
    if (best < pivot_floor)
      throw SingularMatrix("pivot " + std::to_string(best) + " below threshold");
    if (piv != k) {
      for (int j = 0; j < n; ++j)
        std::swap(m[std::size_t(k) * n + j], m[std::size_t(piv) * n + j]);
      std::swap(f.perm[k], f.perm[piv]);
    }
    const double d = m[std::size_t(k) * n + k];
    for (int i = k + 1; i < n; ++i) {
      const double l = m[std::size_t(i) * n + k] / d;
      m[std::size_t(i) * n + k] = l;
      if (l != 0.0)
        for (int j = k + 1; j < n; ++j)
          m[std::size_t(i) * n + j] -= l * m[std::size_t(k) * n + j];
    }
  }
  return f;
}

// Banded Cholesky A = L L^T for narrow-band SPD matrices (lower band
// stored row-major, bw+1 entries per row). Returns nullopt if a pivot
// is nonpositive or below the floor, in which case the caller falls
// back to dense LU.
struct BandChol {
  int n;
  int bw;
  std::vector<double> band;  // band[i*(bw+1) + (j - i + bw)], j in [i-bw, i]

  double& at(int i, int j) { return band[std::size_t(i) * (bw + 1) + (j - i + bw)]; }
  double get(int i, int j) const {
    return band[std::size_t(i) * (bw + 1) + (j - i + bw)];
  }

  void solve(const double* b, double* x) const {
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
      double s = b[i];
      for (int j = std::max(0, i - bw); j < i; ++j) s -= get(i, j) * y[j];
      y[i] = s / get(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = y[i];
      for (int j = i + 1; j <= std::min(n - 1, i + bw); ++j)
        s -= get(j, i) * x[j];
      x[i] = s / get(i, i);
    }
  }
};

std::optional<BandChol> factor_band(const CsrMatrix& a, int bw,
                                    double pivot_floor) {
  BandChol f;
  f.n = a.n;
  f.bw = bw;
  f.band.assign(std::size_t(a.n) * (bw + 1), 0.0);
  for (int i = 0; i < a.n; ++i)
    for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      if (a.col_idx[k] <= i) f.at(i, a.col_idx[k]) = a.values[k];
  for (int i = 0; i < a.n; ++i) {
    for (int j = std::max(0, i - bw); j <= i; ++j) {
      double s = f.get(i, j);
      for (int k = std::max(0, i - bw); k < j; ++k)
        s -= f.get(i, k) * f.get(j, k);
      if (j < i) {
        f.at(i, j) = s / f.get(j, j);
      } else {
        // s is the Schur-complement pivot; defer sketchy cases to LU.
        if (!(s > 0.0) || s < pivot_floor) return std::nullopt;
        f.at(i, i) = std::sqrt(s);
      }
    }
  }
  return f;
}

template <typename Solver>
DenseVector refine(const CsrMatrix& a, const DenseVector& b,
                   const Solver& solver) {
  const int n = a.n;
  DenseVector x(n), r(n), d(n);
  solver.solve(b.data(), x.data());
  const double bn = norm2_fp64(b);
  for (int pass = 0; pass < 3; ++pass) {
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
        s += a.values[k] * x[a.col_idx[k]];
      r[i] = b[i] - s;
    }
    if (bn == 0.0 || norm2_fp64(r) / bn <= 1e-13) break;
    solver.solve(r.data(), d.data());
    for (int i = 0; i < n; ++i) x[i] += d[i];
  }
  return x;
}

}  // namespace

DenseVector direct_solve(const CsrMatrix& a, const DenseVector& b) {
  if (a.n != static_cast<int>(b.size()))
    throw std::invalid_argument("direct_solve: dimension mismatch");
  if (a.n == 0) return {};
  const double pivot_floor = kPivotRel * max_abs(a);
  const int bw = bandwidth(a);
  if (bw + 1 < a.n / 4 && a.n > 64) {
    if (auto chol = factor_band(a, bw, pivot_floor))
      return refine(a, b, *chol);
  }
  return refine(a, b, factor_dense(a, pivot_floor));
}

}  // namespace mpcg
