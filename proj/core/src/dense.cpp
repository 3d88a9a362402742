#include "ihnn/dense.hpp"

#include <cmath>
#include <string>

#include "ihnn/errors.hpp"

namespace ihnn {

namespace {

std::string shape_str(const DenseMatrix& m) {
  return std::to_string(m.rows) + "x" + std::to_string(m.cols);
}

[[noreturn]] void shape_error(const char* op, const DenseMatrix& a, const DenseMatrix& b) {
  throw ValidationError(std::string(op) + ": incompatible shapes " + shape_str(a) +
                        " and " + shape_str(b));
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t r, std::size_t c, std::vector<double> vals)
    : rows(r), cols(c), values(std::move(vals)) {
  if (values.size() != rows * cols)
    throw ValidationError("DenseMatrix: value count " + std::to_string(values.size()) +
                          " does not match shape " + shape_str(*this));
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> init) {
  rows = init.size();
  cols = rows == 0 ? 0 : init.begin()->size();
  values.reserve(rows * cols);
  for (const auto& row : init) {
    if (row.size() != cols) throw ValidationError("DenseMatrix: ragged initializer");
    values.insert(values.end(), row.begin(), row.end());
  }
}

void DenseMatrix::check_finite(const char* context) const {
  for (double v : values) {
    if (!std::isfinite(v))
      throw ValidationError(std::string(context) + ": matrix contains a non-finite entry");
  }
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows) shape_error("matmul", a, b);
  DenseMatrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    double* ci = c.row_data(i);
    const double* ai = a.row_data(i);
    for (std::size_t l = 0; l < a.cols; ++l) {
      const double ail = ai[l];
      if (ail == 0.0) continue;
      const double* bl = b.row_data(l);
      for (std::size_t j = 0; j < b.cols; ++j) ci[j] += ail * bl[j];
    }
  }
  return c;
}

DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows != b.rows) shape_error("matmul_at_b", a, b);
  DenseMatrix c(a.cols, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* ai = a.row_data(i);
    const double* bi = b.row_data(i);
    for (std::size_t l = 0; l < a.cols; ++l) {
      const double ail = ai[l];
      if (ail == 0.0) continue;
      double* cl = c.row_data(l);
      for (std::size_t j = 0; j < b.cols; ++j) cl[j] += ail * bi[j];
    }
  }
  return c;
}

DenseMatrix matmul_a_bt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.cols) shape_error("matmul_a_bt", a, b);
  DenseMatrix c(a.rows, b.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* ai = a.row_data(i);
    double* ci = c.row_data(i);
    for (std::size_t j = 0; j < b.rows; ++j) {
      const double* bj = b.row_data(j);
      double acc = 0.0;
      for (std::size_t l = 0; l < a.cols; ++l) acc += ai[l] * bj[l];
      ci[j] = acc;
    }
  }
  return c;
}

void add_inplace(DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) shape_error("add_inplace", a, b);
  for (std::size_t i = 0; i < a.values.size(); ++i) a.values[i] += b.values[i];
}

void axpy_inplace(DenseMatrix& a, double alpha, const DenseMatrix& b) {
  if (!a.same_shape(b)) shape_error("axpy_inplace", a, b);
  for (std::size_t i = 0; i < a.values.size(); ++i) a.values[i] += alpha * b.values[i];
}

void scale_inplace(DenseMatrix& a, double alpha) {
  for (double& v : a.values) v *= alpha;
}

DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) shape_error("hadamard", a, b);
  DenseMatrix c(a.rows, a.cols);
  for (std::size_t i = 0; i < a.values.size(); ++i) c.values[i] = a.values[i] * b.values[i];
  return c;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) shape_error("max_abs_diff", a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

double max_abs(const DenseMatrix& a) {
  double m = 0.0;
  for (double v : a.values) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> column_sums(const DenseMatrix& a) {
  std::vector<double> sums(a.cols, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* ai = a.row_data(i);
    for (std::size_t j = 0; j < a.cols; ++j) sums[j] += ai[j];
  }
  return sums;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
  return t;
}

}  // namespace ihnn
