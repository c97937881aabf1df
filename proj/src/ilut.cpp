#include "mpcg/ilut.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "mpcg/errors.hpp"

namespace mpcg {

namespace {

constexpr double kPivotRel = 1e-14;

struct RowBuilder {
  std::vector<std::int64_t> row_ptr{0};
  std::vector<std::int32_t> col_idx;
  std::vector<double> values;

  void push(const std::vector<std::pair<int, double>>& row) {
    for (const auto& [j, v] : row) {
      col_idx.push_back(j);
      values.push_back(v);
    }
    row_ptr.push_back(static_cast<std::int64_t>(col_idx.size()));
  }

  CsrMatrix finish(int n) {
    CsrMatrix m;
    m.n = n;
    m.row_ptr = std::move(row_ptr);
    m.col_idx = std::move(col_idx);
    m.values = std::move(values);
    return m;
  }
};

// Keeps the `cap` largest-magnitude entries, then restores column order.
void prune_row(std::vector<std::pair<int, double>>& row, std::size_t cap) {
  if (row.size() > cap) {
    std::nth_element(row.begin(), row.begin() + cap, row.end(),
                     [](const auto& a, const auto& b) {
                       return std::fabs(a.second) > std::fabs(b.second);
                     });
    row.resize(cap);
  }
  std::sort(row.begin(), row.end());
}

}  // namespace

IlutFactors ilut_factor(const CsrMatrix& a, double drop_tol,
                        double fill_factor, FormatTag storage_fmt) {
  if (drop_tol < 0.0) throw std::invalid_argument("ilut: drop_tol < 0");
  if (fill_factor < 1.0) throw std::invalid_argument("ilut: fill_factor < 1");
  const PrecisionFormat& fmt = format_of(storage_fmt);
  const int n = a.n;
  const double pivot_floor = kPivotRel * max_abs(a);

  RowBuilder lower, upper;
  std::vector<double> u_diag(n, 0.0);
  std::vector<double> w(n, 0.0);
  std::vector<char> in_pattern(n, 0);
  std::vector<int> pattern;
  std::vector<std::pair<int, double>> l_row, u_row;

  for (int i = 0; i < n; ++i) {
    pattern.clear();
    std::set<int> active_lower;
    double row_norm_sq = 0.0;
    for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const int j = a.col_idx[k];
      w[j] = a.values[k];
      in_pattern[j] = 1;
      pattern.push_back(j);
      if (j < i) active_lower.insert(j);
      row_norm_sq += a.values[k] * a.values[k];
    }
    const std::int64_t row_nnz = a.row_ptr[i + 1] - a.row_ptr[i];
    const double tau = drop_tol * std::sqrt(row_norm_sq);
    const std::size_t cap =
        static_cast<std::size_t>(fill_factor * double(row_nnz) / 2.0) + 1;

    while (!active_lower.empty()) {
      const int k = *active_lower.begin();
      active_lower.erase(active_lower.begin());
      // Drop in row-value units (before the pivot division), the same
      // scale the threshold lives on.
      if (std::fabs(w[k]) < tau) {
        w[k] = 0.0;
        continue;
      }
      const double lik = w[k] / u_diag[k];
      w[k] = lik;
      // Subtract lik * (stored U row k), skipping its diagonal.
      for (std::int64_t p = upper.row_ptr[k]; p < upper.row_ptr[k + 1]; ++p) {
        const int j = upper.col_idx[p];
        if (j == k) continue;
        if (!in_pattern[j]) {
          in_pattern[j] = 1;
          pattern.push_back(j);
          w[j] = 0.0;
          if (j < i) active_lower.insert(j);
        }
        w[j] -= lik * upper.values[p];
      }
    }

    l_row.clear();
    u_row.clear();
    for (int j : pattern) {
      const double v = w[j];
      if (j < i) {
        if (v != 0.0) l_row.emplace_back(j, v);
      } else if (j > i) {
        if (std::fabs(v) >= tau && v != 0.0) u_row.emplace_back(j, v);
      }
    }
    const double pivot = w[i];
    for (int j : pattern) {
      w[j] = 0.0;
      in_pattern[j] = 0;
    }
    if (std::fabs(pivot) < pivot_floor || pivot == 0.0) throw ZeroPivot(i);

    prune_row(l_row, cap - 1);
    prune_row(u_row, cap - 1);
    for (auto& [j, v] : l_row) v = round_scalar(v, fmt);
    l_row.emplace_back(i, 1.0);
    lower.push(l_row);

    const double pivot_rounded = round_scalar(pivot, fmt);
    for (auto& [j, v] : u_row) v = round_scalar(v, fmt);
    u_row.insert(u_row.begin(), {i, pivot_rounded});
    upper.push(u_row);
    u_diag[i] = pivot_rounded;
  }

  IlutFactors f;
  f.lower = lower.finish(n);
  f.upper = upper.finish(n);
  f.storage_fmt = storage_fmt;
  f.drop_tol = drop_tol;
  f.fill_factor = fill_factor;
  return f;
}

DenseVector apply_precond(const IlutFactors& m, const DenseVector& r,
                          const PrecisionFormat& fmt, EmulationMode mode) {
  const CsrMatrix& low = m.lower;
  const CsrMatrix& up = m.upper;
  const int n = low.n;
  if (n != static_cast<int>(r.size()))
    throw std::invalid_argument("apply_precond: dimension mismatch");
  DenseVector y(n), z(n);

  if (mode == EmulationMode::Strict) {
    for (int i = 0; i < n; ++i) {
      double acc = round_scalar(r[i], fmt);
      for (std::int64_t k = low.row_ptr[i]; k < low.row_ptr[i + 1]; ++k) {
        const int j = low.col_idx[k];
        if (j == i) continue;  // unit diagonal
        const double prod =
            round_scalar(round_scalar(low.values[k], fmt) * y[j], fmt);
        acc = round_scalar(acc - prod, fmt);
      }
      y[i] = acc;
    }
    for (int i = n - 1; i >= 0; --i) {
      double acc = y[i];
      double diag = 1.0;
      for (std::int64_t k = up.row_ptr[i]; k < up.row_ptr[i + 1]; ++k) {
        const int j = up.col_idx[k];
        if (j == i) {
          diag = round_scalar(up.values[k], fmt);
          continue;
        }
        const double prod =
            round_scalar(round_scalar(up.values[k], fmt) * z[j], fmt);
        acc = round_scalar(acc - prod, fmt);
      }
      z[i] = round_scalar(acc / diag, fmt);
    }
    return z;
  }

  // Fast: rounded inputs, double solves, rounded result.
  for (int i = 0; i < n; ++i) {
    double acc = round_scalar(r[i], fmt);
    for (std::int64_t k = low.row_ptr[i]; k < low.row_ptr[i + 1]; ++k) {
      const int j = low.col_idx[k];
      if (j == i) continue;
      acc -= round_scalar(low.values[k], fmt) * y[j];
    }
    y[i] = acc;
  }
  for (int i = n - 1; i >= 0; --i) {
    double acc = y[i];
    double diag = 1.0;
    for (std::int64_t k = up.row_ptr[i]; k < up.row_ptr[i + 1]; ++k) {
      const int j = up.col_idx[k];
      if (j == i) {
        diag = round_scalar(up.values[k], fmt);
        continue;
      }
      acc -= round_scalar(up.values[k], fmt) * z[j];
    }
    z[i] = acc / diag;
  }
  for (double& v : z) v = round_scalar(v, fmt);
  return z;
}

IlutFactors jacobi_fallback(const CsrMatrix& a) {
  const PrecisionFormat& fp32 = format_of(FormatTag::fp32);
  const int n = a.n;
  CsrMatrix diag = csr_identity(n);
  for (int i = 0; i < n; ++i) {
    const double d = a.at(i, i);
    if (d == 0.0) throw ZeroDiagonal(i);
    diag.values[i] = round_scalar(d, fp32);
  }
  IlutFactors f;
  f.lower = csr_identity(n);
  f.upper = std::move(diag);
  f.storage_fmt = FormatTag::fp32;
  f.from_jacobi_fallback = true;
  return f;
}

IlutFactors ilut_or_jacobi(const CsrMatrix& a, double drop_tol,
                           double fill_factor, FormatTag storage_fmt) {
  try {
    return ilut_factor(a, drop_tol, fill_factor, storage_fmt);
  } catch (const ZeroPivot&) {
    return jacobi_fallback(a);
  }
}

}  // namespace mpcg
