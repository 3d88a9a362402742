#pragma once

#include <cstdint>
#include <vector>

#include "ihnn/dense.hpp"
#include "ihnn/sparse.hpp"

namespace ihnn {

/// Euclidean projection of v onto the l1 ball of radius r (sort-based exact
/// method). Feasible inputs are returned unchanged, bit for bit.
std::vector<double> project_row_l1(const std::vector<double>& v, double r);

/// Applies project_row_l1 to every row of w in place. Rows already inside the
/// ball are left untouched.
void project_rows_l1_inplace(DenseMatrix& w, double r);

/// Matrix infinity norm: maximum absolute row sum.
double inf_norm(const DenseMatrix& w);

struct OpnormConfig {
  double tol = 1e-10;          // relative change of the Rayleigh estimate
  std::size_t max_iter = 20000;
  std::uint64_t seed = 1;
};

/// Largest singular value of A, estimated by power iteration on A^T A from a
/// seeded random start. Non-convergence throws NumericalError carrying the
/// last estimate and residual.
double opnorm_power_iteration(const SparseMatrix& a, const OpnormConfig& cfg = {});

}  // namespace ihnn
