#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ihnn/dense.hpp"
#include "ihnn/operators.hpp"

namespace ihnn {

enum class Activation { relu, sigmoid, identity };

double activate(Activation act, double x);
double activate_derivative(Activation act, double x);

const char* activation_name(Activation act);
Activation parse_activation(const std::string& name);

struct SolverConfig {
  double tol = 1e-6;       // max-abs difference between successive iterates
  std::size_t max_iter = 300;
};

// Stacked embeddings: rows 0..n-1 hold the node part, rows n..n+E-1 the
// hyperedge part.
struct EmbeddingState {
  DenseMatrix z;
  std::size_t iterations_used = 0;
  double final_residual = 0.0;
  std::vector<double> residual_history;
};

// One application of the update map: act(A z W + B).
DenseMatrix equilibrium_step(const NormalizedOperators& ops, const DenseMatrix& z,
                             const DenseMatrix& w, const DenseMatrix& b, Activation act);

// A z W + B.
DenseMatrix preactivation(const NormalizedOperators& ops, const DenseMatrix& z,
                          const DenseMatrix& w, const DenseMatrix& b);

// Entrywise act'(A z W + B), evaluated at z.
DenseMatrix derivative_mask(const NormalizedOperators& ops, const DenseMatrix& z,
                            const DenseMatrix& w, const DenseMatrix& b, Activation act);

// Iterates z <- act(A z W + B) from z = 0 (or a caller-supplied start) until
// the residual drops to cfg.tol. Requires inf_norm(W) * opnorm(A) < 1.
EmbeddingState forward_fixed_point(const NormalizedOperators& ops, const DenseMatrix& w,
                                   const DenseMatrix& b, Activation act,
                                   const SolverConfig& cfg = {},
                                   const DenseMatrix* start = nullptr);

// Solves the adjoint fixed point g = A (d_mask . g) W^T + grad_bar, where
// d_mask is the activation-derivative mask at the converged embedding and
// grad_bar is the loss gradient taken directly with respect to z.
DenseMatrix backward_adjoint(const NormalizedOperators& ops, const DenseMatrix& w,
                             const DenseMatrix& d_mask, const DenseMatrix& grad_bar,
                             const SolverConfig& cfg = {1e-8, 300},
                             std::size_t* iterations_used = nullptr);

DenseMatrix backward_adjoint(const NormalizedOperators& ops, const DenseMatrix& w,
                             const DenseMatrix& b, const DenseMatrix& z,
                             const DenseMatrix& grad_bar, Activation act,
                             const SolverConfig& cfg = {1e-8, 300});

struct ParamGradients {
  DenseMatrix grad_w;           // d x d
  DenseMatrix grad_u;           // d_in x d
  std::vector<double> grad_c;   // length d
};

// Chain rule through the fixed point: with m = d_mask . g,
//   grad_w = (A z)^T m,  grad_u = x_hat^T m,  grad_c = column sums of m.
ParamGradients param_gradients(const NormalizedOperators& ops, const DenseMatrix& z,
                               const DenseMatrix& g, const DenseMatrix& d_mask,
                               const DenseMatrix& x_hat);

}  // namespace ihnn
