#pragma once

#include "ihnn/dense.hpp"
#include "ihnn/hypergraph.hpp"
#include "ihnn/linalg.hpp"
#include "ihnn/sparse.hpp"

namespace ihnn {

// Normalized node<->hyperedge coupling and its symmetric block form.
//
//   l_ve    (v,e) entry 1/sqrt(deg(v)*|e|) when v is in e
//   a_block [[0, l_ve], [l_ve^T, 0]], shape (n+E)x(n+E)
//
// kappa_radius is the per-row l1 budget that keeps inf_norm(W)*opnorm_a
// below kappa.
struct NormalizedOperators {
  SparseMatrix l_ve;
  SparseMatrix a_block;
  double opnorm_a = 0.0;
  double kappa_radius = 0.0;

  std::size_t node_count() const { return l_ve.rows; }
  std::size_t edge_count() const { return l_ve.cols; }
};

// Zero-degree nodes get all-zero rows (0^{-1/2} is taken as 0).
SparseMatrix build_lve(const Hypergraph& hg);

NormalizedOperators build_block_operator(const SparseMatrix& l_ve, double kappa,
                                         const OpnormConfig& cfg = {});

NormalizedOperators build_block_operator(const Hypergraph& hg, double kappa,
                                         const OpnormConfig& cfg = {});

// Dense evaluation of D_v^{-1/2} H D_e^{-1} H^T D_v^{-1/2}; test oracle,
// guarded to n <= 2000.
DenseMatrix dense_laplacian_oracle(const Hypergraph& hg);

}  // namespace ihnn
