#include "mpcg/csr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mpcg {

void CsrMatrix::validate() const {
  if (n < 0) throw std::invalid_argument("csr: negative dimension");
  if (row_ptr.size() != static_cast<std::size_t>(n) + 1)
    throw std::invalid_argument("csr: row_ptr length mismatch");
  if (row_ptr[0] != 0) throw std::invalid_argument("csr: row_ptr[0] != 0");
  if (row_ptr[n] != nnz() ||
      col_idx.size() != values.size())
    throw std::invalid_argument("csr: nnz mismatch");
  for (int i = 0; i < n; ++i) {
    if (row_ptr[i] > row_ptr[i + 1])
      throw std::invalid_argument("csr: row_ptr decreasing");
    for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      if (col_idx[k] < 0 || col_idx[k] >= n)
        throw std::invalid_argument("csr: column index out of range");
      if (k > row_ptr[i] && col_idx[k] <= col_idx[k - 1])
        throw std::invalid_argument("csr: columns not strictly increasing");
    }
  }
}

double CsrMatrix::at(int i, int j) const {
  const auto begin = col_idx.begin() + row_ptr[i];
  const auto end = col_idx.begin() + row_ptr[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return values[it - col_idx.begin()];
}

CsrMatrix csr_from_triplets(int n, std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(),
            [](const Triplet& a, const Triplet& b) {
              return a.row != b.row ? a.row < b.row : a.col < b.col;
            });
  CsrMatrix m;
  m.n = n;
  m.row_ptr.assign(n + 1, 0);
  for (std::size_t k = 0; k < triplets.size();) {
    const int i = triplets[k].row;
    const int j = triplets[k].col;
    if (i < 0 || i >= n || j < 0 || j >= n)
      throw std::invalid_argument("triplet index out of range");
    double sum = 0.0;
    while (k < triplets.size() && triplets[k].row == i && triplets[k].col == j)
      sum += triplets[k++].value;
    m.col_idx.push_back(j);
    m.values.push_back(sum);
    ++m.row_ptr[i + 1];
  }
  for (int i = 0; i < n; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
  return m;
}

CsrMatrix csr_identity(int n) {
  CsrMatrix m;
  m.n = n;
  m.row_ptr.resize(n + 1);
  m.col_idx.resize(n);
  m.values.assign(n, 1.0);
  for (int i = 0; i <= n; ++i) m.row_ptr[i] = i;
  for (int i = 0; i < n; ++i) m.col_idx[i] = i;
  return m;
}

bool is_symmetric(const CsrMatrix& a) {
  for (int i = 0; i < a.n; ++i)
    for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const int j = a.col_idx[k];
      if (a.at(j, i) != a.values[k]) return false;
    }
  return true;
}

double max_abs(const CsrMatrix& a) {
  double m = 0.0;
  for (double v : a.values) m = std::max(m, std::fabs(v));
  return m;
}

int bandwidth(const CsrMatrix& a) {
  int bw = 0;
  for (int i = 0; i < a.n; ++i)
    for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      bw = std::max(bw, std::abs(i - a.col_idx[k]));
  return bw;
}

}  // namespace mpcg
