#include <tuple>
#include <vector>

#include "doctest.h"
#include "ihnn/errors.hpp"
#include "ihnn/sparse.hpp"
#include "oracles.hpp"

using ihnn::DenseMatrix;
using ihnn::SparseMatrix;

TEST_SUITE_BEGIN("sparse");

TEST_CASE("from_triplets orders columns and accumulates duplicates") {
  std::vector<std::tuple<std::size_t, std::size_t, double>> t = {
      {1, 2, 3.0}, {0, 1, 1.0}, {1, 0, 2.0}, {1, 2, 0.5}};
  const SparseMatrix a = SparseMatrix::from_triplets(2, 3, t);
  const DenseMatrix d = a.to_dense();
  CHECK(d(0, 1) == 1.0);
  CHECK(d(1, 0) == 2.0);
  CHECK(d(1, 2) == 3.5);
  CHECK(a.nnz() == 3);
  for (std::size_t r = 0; r < a.rows; ++r)
    for (std::size_t k = a.row_ptr[r] + 1; k < a.row_ptr[r + 1]; ++k)
      CHECK(a.col_idx[k - 1] < a.col_idx[k]);
}

TEST_CASE("from_triplets rejects out-of-range indices") {
  std::vector<std::tuple<std::size_t, std::size_t, double>> t = {{2, 0, 1.0}};
  CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 3, t), ihnn::ValidationError);
  t = {{0, 3, 1.0}};
  CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 3, t), ihnn::ValidationError);
}

TEST_CASE("identity") {
  const SparseMatrix eye = SparseMatrix::identity(4);
  const DenseMatrix d = eye.to_dense();
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(d(i, j) == (i == j ? 1.0 : 0.0));
}

TEST_CASE("transpose round-trip") {
  ihnn::Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const SparseMatrix a = oracles::random_sparse(rng, 5 + rng.uniform_int(10),
                                                  3 + rng.uniform_int(12), 0.3);
    const SparseMatrix att = a.transposed().transposed();
    CHECK(att.rows == a.rows);
    CHECK(att.cols == a.cols);
    CHECK(ihnn::max_abs_diff(att.to_dense(), a.to_dense()) == 0.0);
    const DenseMatrix at = a.transposed().to_dense();
    const DenseMatrix ad = a.to_dense();
    for (std::size_t i = 0; i < a.rows; ++i)
      for (std::size_t j = 0; j < a.cols; ++j) CHECK(at(j, i) == ad(i, j));
  }
}

TEST_CASE("spmm matches the dense triple loop") {
  ihnn::Rng rng(7);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t m = 1 + rng.uniform_int(12);
    const std::size_t k = 1 + rng.uniform_int(12);
    const std::size_t n = 1 + rng.uniform_int(8);
    const SparseMatrix a = oracles::random_sparse(rng, m, k, 0.4);
    const DenseMatrix b = oracles::random_dense(rng, k, n);
    const DenseMatrix got = ihnn::spmm(a, b);
    const DenseMatrix want = oracles::dense_matmul(a.to_dense(), b);
    CHECK(ihnn::max_abs_diff(got, want) <= 1e-12);
  }
}

TEST_CASE("spmv agrees with spmm on a single column") {
  ihnn::Rng rng(19);
  const SparseMatrix a = oracles::random_sparse(rng, 9, 6, 0.5);
  std::vector<double> x(6);
  for (double& v : x) v = rng.uniform(-2.0, 2.0);
  DenseMatrix xc(6, 1);
  for (std::size_t i = 0; i < 6; ++i) xc(i, 0) = x[i];
  const std::vector<double> y = ihnn::spmv(a, x);
  const DenseMatrix yc = ihnn::spmm(a, xc);
  REQUIRE(y.size() == 9);
  for (std::size_t i = 0; i < 9; ++i) CHECK(y[i] == doctest::Approx(yc(i, 0)).epsilon(1e-15));
}

TEST_CASE("spmm rejects mismatched shapes") {
  const SparseMatrix a = SparseMatrix::identity(3);
  const DenseMatrix b(4, 2);
  CHECK_THROWS_AS(ihnn::spmm(a, b), ihnn::ValidationError);
}

TEST_CASE("validate catches corrupted storage") {
  SparseMatrix a = SparseMatrix::identity(3);
  a.col_idx[1] = 9;
  CHECK_THROWS_AS(a.validate(), ihnn::ValidationError);
  SparseMatrix b = SparseMatrix::identity(3);
  b.row_ptr[1] = 5;
  CHECK_THROWS_AS(b.validate(), ihnn::ValidationError);
}

TEST_SUITE_END();
