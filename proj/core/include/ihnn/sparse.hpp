#pragma once

#include <cstddef>
#include <tuple>
#include <vector>

#include "ihnn/dense.hpp"

namespace ihnn {

/// Compressed-sparse-row matrix of 64-bit floats.
///
/// Invariants: column indices strictly increase within each row, no explicit
/// zeros are stored, and row_ptr/col_idx are consistent with rows/cols.
struct SparseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr;  // length rows + 1
  std::vector<std::size_t> col_idx;
  std::vector<double> values;

  SparseMatrix() : row_ptr(1, 0) {}
  SparseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), row_ptr(r + 1, 0) {}

  std::size_t nnz() const { return values.size(); }

  /// Build from (row, col, value) triplets. Triplets are sorted; duplicate
  /// coordinates are summed; exact zeros are dropped.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<std::tuple<std::size_t, std::size_t, double>> triplets);

  static SparseMatrix identity(std::size_t n);

  SparseMatrix transposed() const;

  DenseMatrix to_dense() const;

  /// Throws ValidationError if a structural invariant is broken.
  void validate() const;
};

/// Sparse-dense product A * B. Deterministic: each output row accumulates its
/// terms in stored (ascending-column) order.
DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b);

/// Sparse matrix-vector product A * x.
std::vector<double> spmv(const SparseMatrix& a, const std::vector<double>& x);

}  // namespace ihnn
