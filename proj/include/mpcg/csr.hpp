#pragma once

#include <cstdint>
#include <vector>

namespace mpcg {

using DenseVector = std::vector<double>;

/// Compressed sparse row matrix with native double values.
///
/// Invariants (checked by validate()): row_ptr is nondecreasing with
/// row_ptr[0] == 0 and row_ptr[n] == nnz; column indices lie in [0, n)
/// and are strictly increasing within each row. Instances are immutable
/// after construction and safe to share across threads.
struct CsrMatrix {
  int n = 0;
  std::vector<std::int64_t> row_ptr;
  std::vector<std::int32_t> col_idx;
  std::vector<double> values;

  std::int64_t nnz() const { return static_cast<std::int64_t>(values.size()); }

  /// Throws std::invalid_argument on any structural violation.
  void validate() const;

  /// Value at (i, j), zero if not stored. Binary search per row.
  double at(int i, int j) const;
};

/// Builds a CSR matrix from (row, col, value) triplets. Duplicate
/// coordinates accumulate additively; explicit zeros are kept.
struct Triplet {
  int row;
  int col;
  double value;
};

CsrMatrix csr_from_triplets(int n, std::vector<Triplet> triplets);

/// Identity matrix of dimension n.
CsrMatrix csr_identity(int n);

/// True if the sparsity pattern and values are exactly symmetric.
bool is_symmetric(const CsrMatrix& a);

/// Maximum |values| entry, 0 for an empty matrix.
double max_abs(const CsrMatrix& a);

/// Half bandwidth: max |i - j| over stored entries.
int bandwidth(const CsrMatrix& a);

}  // namespace mpcg
