#include "ihnn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "ihnn/errors.hpp"
#include "ihnn/rng.hpp"

namespace ihnn {

std::vector<double> project_row_l1(const std::vector<double>& v, double r) {
  if (!(r > 0.0)) throw ValidationError("project_row_l1: radius must be positive");
  double l1 = 0.0;
  for (double x : v) {
    if (std::isnan(x)) throw ValidationError("project_row_l1: NaN in input");
    l1 += std::abs(x);
  }
  // The 1e-12 slack keeps re-projection of an already-projected row a no-op
  // despite rounding in the thresholded sum.
  if (l1 <= r + 1e-12) return v;

  // Soft threshold tau with sum_i max(|v_i| - tau, 0) = r; found by scanning
  // magnitudes in descending order.
  std::vector<double> mags(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) mags[i] = std::abs(v[i]);
  std::sort(mags.begin(), mags.end(), std::greater<double>());
  double cumsum = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < mags.size(); ++j) {
    cumsum += mags[j];
    const double candidate = (cumsum - r) / static_cast<double>(j + 1);
    if (mags[j] <= candidate) break;
    tau = candidate;
  }

  std::vector<double> u(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double m = std::abs(v[i]) - tau;
    u[i] = m > 0.0 ? (v[i] > 0.0 ? m : -m) : 0.0;
  }
  return u;
}

void project_rows_l1_inplace(DenseMatrix& w, double r) {
  std::vector<double> row(w.cols);
  for (std::size_t i = 0; i < w.rows; ++i) {
    const double* src = w.row_data(i);
    row.assign(src, src + w.cols);
    std::vector<double> proj = project_row_l1(row, r);
    if (proj != row) std::copy(proj.begin(), proj.end(), w.row_data(i));
  }
}

double inf_norm(const DenseMatrix& w) {
  double m = 0.0;
  for (std::size_t i = 0; i < w.rows; ++i) {
    const double* row = w.row_data(i);
    double sum = 0.0;
    for (std::size_t j = 0; j < w.cols; ++j) {
      if (std::isnan(row[j])) throw ValidationError("inf_norm: NaN entry");
      sum += std::abs(row[j]);
    }
    m = std::max(m, sum);
  }
  return m;
}

double opnorm_power_iteration(const SparseMatrix& a, const OpnormConfig& cfg) {
  if (a.rows == 0 || a.cols == 0)
    throw ValidationError("opnorm_power_iteration: empty matrix");
  if (a.nnz() == 0) return 0.0;

  const SparseMatrix at = a.transposed();
  Rng rng(cfg.seed);
  auto random_unit = [&rng](std::size_t n) {
    std::vector<double> x(n);
    double norm = 0.0;
    for (double& xi : x) {
      xi = rng.normal();
      norm += xi * xi;
    }
    norm = std::sqrt(norm);
    for (double& xi : x) xi /= norm;
    return x;
  };

  std::vector<double> x = random_unit(a.cols);
  double estimate = 0.0;
  double change = 0.0;
  for (std::size_t iter = 0; iter < cfg.max_iter; ++iter) {
    std::vector<double> y = spmv(a, x);  // y = A x
    double y2 = 0.0;
    for (double yi : y) y2 += yi * yi;
    const double next = std::sqrt(y2);   // ||A x|| for unit x

    x = spmv(at, y);                     // x <- A^T A x, renormalized
    double x2 = 0.0;
    for (double xi : x) x2 += xi * xi;
    const double xn = std::sqrt(x2);
    if (xn == 0.0) {
      // Start vector landed in the null space; re-draw.
      x = random_unit(a.cols);
      estimate = 0.0;
      continue;
    }
    for (double& xi : x) xi /= xn;

    change = std::abs(next - estimate);
    estimate = next;
    if (change <= cfg.tol * std::max(estimate, 1e-300)) return estimate;
  }
  throw NumericalError("opnorm_power_iteration: no convergence after " +
                       std::to_string(cfg.max_iter) + " iterations; last estimate " +
                       std::to_string(estimate) + ", residual " + std::to_string(change));
}

}  // namespace ihnn
