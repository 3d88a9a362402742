#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace ihnn {

/// Row-major dense matrix of 64-bit floats.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}
  DenseMatrix(std::size_t r, std::size_t c, std::vector<double> vals);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> init);

  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

  double* row_data(std::size_t r) { return values.data() + r * cols; }
  const double* row_data(std::size_t r) const { return values.data() + r * cols; }

  bool same_shape(const DenseMatrix& other) const {
    return rows == other.rows && cols == other.cols;
  }

  /// Throws ValidationError if any entry is NaN or infinite.
  void check_finite(const char* context) const;
};

/// C = A * B.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

/// C = A^T * B (A and B share their row count).
DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b);

/// C = A * B^T (A and B share their column count).
DenseMatrix matmul_a_bt(const DenseMatrix& a, const DenseMatrix& b);

/// a += b, elementwise.
void add_inplace(DenseMatrix& a, const DenseMatrix& b);

/// a += alpha * b, elementwise.
void axpy_inplace(DenseMatrix& a, double alpha, const DenseMatrix& b);

/// a *= alpha.
void scale_inplace(DenseMatrix& a, double alpha);

/// Elementwise product.
DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b);

/// max_{ij} |a_ij - b_ij|.
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

/// max_{ij} |a_ij|.
double max_abs(const DenseMatrix& a);

/// Per-column sums, length a.cols.
std::vector<double> column_sums(const DenseMatrix& a);

DenseMatrix transpose(const DenseMatrix& a);

}  // namespace ihnn
