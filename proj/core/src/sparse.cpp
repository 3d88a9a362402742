#include "ihnn/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ihnn/errors.hpp"

namespace ihnn {

SparseMatrix SparseMatrix::from_triplets(
    std::size_t rows, std::size_t cols,
    std::vector<std::tuple<std::size_t, std::size_t, double>> triplets) {
  for (const auto& [r, c, v] : triplets) {
    if (r >= rows || c >= cols)
      throw ValidationError("from_triplets: coordinate (" + std::to_string(r) + "," +
                            std::to_string(c) + ") outside " + std::to_string(rows) + "x" +
                            std::to_string(cols));
    (void)v;
  }
  std::sort(triplets.begin(), triplets.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });

  SparseMatrix m(rows, cols);
  m.col_idx.reserve(triplets.size());
  m.values.reserve(triplets.size());
  std::size_t i = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    while (i < triplets.size() && std::get<0>(triplets[i]) == r) {
      const std::size_t c = std::get<1>(triplets[i]);
      double v = std::get<2>(triplets[i]);
      ++i;
      while (i < triplets.size() && std::get<0>(triplets[i]) == r &&
             std::get<1>(triplets[i]) == c) {
        v += std::get<2>(triplets[i]);
        ++i;
      }
      if (v != 0.0) {
        m.col_idx.push_back(c);
        m.values.push_back(v);
      }
    }
    m.row_ptr[r + 1] = m.col_idx.size();
  }
  return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  SparseMatrix m(n, n);
  m.col_idx.resize(n);
  m.values.assign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    m.col_idx[i] = i;
    m.row_ptr[i + 1] = i + 1;
  }
  return m;
}

SparseMatrix SparseMatrix::transposed() const {
  SparseMatrix t(cols, rows);
  t.col_idx.resize(nnz());
  t.values.resize(nnz());
  // Counting sort by column.
  std::vector<std::size_t> counts(cols, 0);
  for (std::size_t c : col_idx) ++counts[c];
  for (std::size_t c = 0; c < cols; ++c) t.row_ptr[c + 1] = t.row_ptr[c] + counts[c];
  std::vector<std::size_t> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      const std::size_t pos = next[col_idx[k]]++;
      t.col_idx[pos] = r;
      t.values[pos] = values[k];
    }
  }
  return t;
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) d(r, col_idx[k]) = values[k];
  return d;
}

void SparseMatrix::validate() const {
  if (row_ptr.size() != rows + 1) throw ValidationError("SparseMatrix: row_ptr length mismatch");
  if (row_ptr.front() != 0 || row_ptr.back() != col_idx.size() || col_idx.size() != values.size())
    throw ValidationError("SparseMatrix: index arrays inconsistent");
  for (std::size_t r = 0; r < rows; ++r) {
    if (row_ptr[r] > row_ptr[r + 1]) throw ValidationError("SparseMatrix: row_ptr not monotone");
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      if (col_idx[k] >= cols) throw ValidationError("SparseMatrix: column index out of range");
      if (k > row_ptr[r] && col_idx[k] <= col_idx[k - 1])
        throw ValidationError("SparseMatrix: column indices not strictly increasing in row " +
                              std::to_string(r));
      if (values[k] == 0.0)
        throw ValidationError("SparseMatrix: explicit zero stored in row " + std::to_string(r));
      if (!std::isfinite(values[k]))
        throw ValidationError("SparseMatrix: non-finite value in row " + std::to_string(r));
    }
  }
}

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows)
    throw ValidationError("spmm: inner dimensions differ, " + std::to_string(a.rows) + "x" +
                          std::to_string(a.cols) + " times " + std::to_string(b.rows) + "x" +
                          std::to_string(b.cols));
  DenseMatrix c(a.rows, b.cols);
  const std::size_t d = b.cols;
  for (std::size_t r = 0; r < a.rows; ++r) {
    double* cr = c.row_data(r);
    for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
      const double v = a.values[k];
      const double* br = b.row_data(a.col_idx[k]);
      for (std::size_t j = 0; j < d; ++j) cr[j] += v * br[j];
    }
  }
  return c;
}

std::vector<double> spmv(const SparseMatrix& a, const std::vector<double>& x) {
  if (a.cols != x.size())
    throw ValidationError("spmv: vector length " + std::to_string(x.size()) +
                          " does not match " + std::to_string(a.rows) + "x" +
                          std::to_string(a.cols));
  std::vector<double> y(a.rows, 0.0);
  for (std::size_t r = 0; r < a.rows; ++r) {
    double acc = 0.0;
    for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
      acc += a.values[k] * x[a.col_idx[k]];
    y[r] = acc;
  }
  return y;
}

}  // namespace ihnn
