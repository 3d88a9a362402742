#include "ihnn/operators.hpp"

#include <cmath>
#include <string>

#include "ihnn/errors.hpp"

namespace ihnn {

SparseMatrix build_lve(const Hypergraph& hg) {
  const std::size_t n = hg.node_count;
  const std::size_t m = hg.edge_count();

  std::vector<double> inv_sqrt_deg(n, 0.0);
  for (std::size_t v = 0; v < n; ++v)
    if (hg.node_degrees[v] > 0)
      inv_sqrt_deg[v] = 1.0 / std::sqrt(static_cast<double>(hg.node_degrees[v]));

  std::vector<double> inv_sqrt_card(m);
  for (std::size_t e = 0; e < m; ++e)
    inv_sqrt_card[e] = 1.0 / std::sqrt(static_cast<double>(hg.edge_degrees[e]));

  // node_to_edges lists are ascending by construction, so the CSR can be
  // filled row by row without sorting.
  SparseMatrix l(n, m);
  l.col_idx.reserve(2 * m);
  l.values.reserve(2 * m);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t e : hg.node_to_edges[v]) {
      l.col_idx.push_back(e);
      l.values.push_back(inv_sqrt_deg[v] * inv_sqrt_card[e]);
    }
    l.row_ptr[v + 1] = l.col_idx.size();
  }
  return l;
}

NormalizedOperators build_block_operator(const SparseMatrix& l_ve, double kappa,
                                         const OpnormConfig& cfg) {
  if (!(kappa > 0.0 && kappa < 1.0))
    throw ValidationError("build_block_operator: kappa must lie in (0, 1), got " +
                          std::to_string(kappa));

  const std::size_t n = l_ve.rows;
  const std::size_t m = l_ve.cols;
  const SparseMatrix l_ev = l_ve.transposed();

  SparseMatrix a(n + m, n + m);
  a.col_idx.reserve(2 * l_ve.nnz());
  a.values.reserve(2 * l_ve.nnz());
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t k = l_ve.row_ptr[v]; k < l_ve.row_ptr[v + 1]; ++k) {
      a.col_idx.push_back(n + l_ve.col_idx[k]);
      a.values.push_back(l_ve.values[k]);
    }
    a.row_ptr[v + 1] = a.col_idx.size();
  }
  for (std::size_t e = 0; e < m; ++e) {
    for (std::size_t k = l_ev.row_ptr[e]; k < l_ev.row_ptr[e + 1]; ++k) {
      a.col_idx.push_back(l_ev.col_idx[k]);
      a.values.push_back(l_ev.values[k]);
    }
    a.row_ptr[n + e + 1] = a.col_idx.size();
  }

  NormalizedOperators ops;
  ops.l_ve = l_ve;
  ops.a_block = std::move(a);
  ops.opnorm_a = opnorm_power_iteration(ops.a_block, cfg);
  if (ops.opnorm_a <= 0.0)
    throw ValidationError("build_block_operator: operator norm is zero");
  ops.kappa_radius = kappa / ops.opnorm_a;
  return ops;
}

NormalizedOperators build_block_operator(const Hypergraph& hg, double kappa,
                                         const OpnormConfig& cfg) {
  return build_block_operator(build_lve(hg), kappa, cfg);
}

DenseMatrix dense_laplacian_oracle(const Hypergraph& hg) {
  if (hg.node_count > 2000)
    throw ValidationError("dense_laplacian_oracle: guard is n <= 2000, got n = " +
                          std::to_string(hg.node_count));

  std::vector<double> inv_sqrt_deg(hg.node_count, 0.0);
  for (std::size_t v = 0; v < hg.node_count; ++v)
    if (hg.node_degrees[v] > 0)
      inv_sqrt_deg[v] = 1.0 / std::sqrt(static_cast<double>(hg.node_degrees[v]));

  DenseMatrix l(hg.node_count, hg.node_count);
  for (const auto& edge : hg.hyperedges) {
    const double inv_card = 1.0 / static_cast<double>(edge.size());
    for (std::size_t u : edge)
      for (std::size_t v : edge)
        l(u, v) += inv_sqrt_deg[u] * inv_card * inv_sqrt_deg[v];
  }
  return l;
}

}  // namespace ihnn
