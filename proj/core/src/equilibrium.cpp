#include "ihnn/equilibrium.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "ihnn/errors.hpp"
#include "ihnn/linalg.hpp"
#include "ihnn/sparse.hpp"

namespace ihnn {

double activate(Activation act, double x) {
  switch (act) {
    case Activation::relu: return x > 0.0 ? x : 0.0;
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Activation::identity: return x;
  }
  return 0.0;
}

double activate_derivative(Activation act, double x) {
  switch (act) {
    case Activation::relu: return x > 0.0 ? 1.0 : 0.0;
    case Activation::sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-x));
      return s * (1.0 - s);
    }
    case Activation::identity: return 1.0;
  }
  return 0.0;
}

const char* activation_name(Activation act) {
  switch (act) {
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::identity: return "identity";
  }
  return "relu";
}

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "identity") return Activation::identity;
  throw ValidationError("unknown activation '" + name + "'; use relu, sigmoid, or identity");
}

namespace {

void check_solver_config(const SolverConfig& cfg, const char* who) {
  if (!(cfg.tol > 0.0))
    throw ValidationError(std::string(who) + ": tol must be positive");
  if (cfg.max_iter == 0)
    throw ValidationError(std::string(who) + ": max_iter must be >= 1");
}

void check_contraction(const NormalizedOperators& ops, const DenseMatrix& w, const char* who) {
  const double wn = inf_norm(w);
  if (!(wn * ops.opnorm_a < 1.0))
    throw ValidationError(std::string(who) + ": contraction requires inf_norm(W) * opnorm(A) < 1"
                          "; inf_norm(W) = " + std::to_string(wn) +
                          ", opnorm(A) = " + std::to_string(ops.opnorm_a));
}

std::string residual_trace(const std::vector<double>& history) {
  std::string out;
  const std::size_t from = history.size() > 5 ? history.size() - 5 : 0;
  char buf[32];
  for (std::size_t i = from; i < history.size(); ++i) {
    std::snprintf(buf, sizeof(buf), " %.3e", history[i]);
    out += buf;
  }
  return out;
}

}  // namespace

DenseMatrix preactivation(const NormalizedOperators& ops, const DenseMatrix& z,
                          const DenseMatrix& w, const DenseMatrix& b) {
  DenseMatrix p = matmul(spmm(ops.a_block, z), w);
  add_inplace(p, b);
  return p;
}

DenseMatrix equilibrium_step(const NormalizedOperators& ops, const DenseMatrix& z,
                             const DenseMatrix& w, const DenseMatrix& b, Activation act) {
  DenseMatrix p = preactivation(ops, z, w, b);
  for (double& x : p.values) x = activate(act, x);
  return p;
}

DenseMatrix derivative_mask(const NormalizedOperators& ops, const DenseMatrix& z,
                            const DenseMatrix& w, const DenseMatrix& b, Activation act) {
  DenseMatrix p = preactivation(ops, z, w, b);
  for (double& x : p.values) x = activate_derivative(act, x);
  return p;
}

EmbeddingState forward_fixed_point(const NormalizedOperators& ops, const DenseMatrix& w,
                                   const DenseMatrix& b, Activation act,
                                   const SolverConfig& cfg, const DenseMatrix* start) {
  const std::size_t nm = ops.a_block.rows;
  if (w.rows != w.cols)
    throw ValidationError("forward_fixed_point: W must be square");
  if (b.rows != nm || b.cols != w.cols)
    throw ValidationError("forward_fixed_point: B must be " + std::to_string(nm) + "x" +
                          std::to_string(w.cols) + ", got " + std::to_string(b.rows) + "x" +
                          std::to_string(b.cols));
  w.check_finite("forward_fixed_point: W");
  b.check_finite("forward_fixed_point: B");
  check_solver_config(cfg, "forward_fixed_point");
  check_contraction(ops, w, "forward_fixed_point");

  EmbeddingState state;
  if (start) {
    if (!start->same_shape(b))
      throw ValidationError("forward_fixed_point: start must match B's shape");
    start->check_finite("forward_fixed_point: start");
    state.z = *start;
  } else {
    state.z = DenseMatrix(nm, w.cols);
  }

  for (std::size_t k = 1; k <= cfg.max_iter; ++k) {
    DenseMatrix next = equilibrium_step(ops, state.z, w, b, act);
    const double r = max_abs_diff(next, state.z);
    state.z = std::move(next);
    state.residual_history.push_back(r);
    if (r <= cfg.tol) {
      state.iterations_used = k;
      state.final_residual = r;
      return state;
    }
  }
  throw NumericalError("forward_fixed_point: residual above " + std::to_string(cfg.tol) +
                       " after " + std::to_string(cfg.max_iter) +
                       " iterations; recent residuals:" + residual_trace(state.residual_history));
}

DenseMatrix backward_adjoint(const NormalizedOperators& ops, const DenseMatrix& w,
                             const DenseMatrix& d_mask, const DenseMatrix& grad_bar,
                             const SolverConfig& cfg, std::size_t* iterations_used) {
  const std::size_t nm = ops.a_block.rows;
  if (w.rows != w.cols)
    throw ValidationError("backward_adjoint: W must be square");
  if (d_mask.rows != nm || d_mask.cols != w.cols || !grad_bar.same_shape(d_mask))
    throw ValidationError("backward_adjoint: mask and gradient must be " +
                          std::to_string(nm) + "x" + std::to_string(w.cols));
  grad_bar.check_finite("backward_adjoint: grad_bar");
  check_solver_config(cfg, "backward_adjoint");
  check_contraction(ops, w, "backward_adjoint");

  std::vector<double> history;
  DenseMatrix g = grad_bar;
  for (std::size_t k = 1; k <= cfg.max_iter; ++k) {
    DenseMatrix next = matmul_a_bt(spmm(ops.a_block, hadamard(d_mask, g)), w);
    add_inplace(next, grad_bar);
    const double r = max_abs_diff(next, g);
    g = std::move(next);
    history.push_back(r);
    if (r <= cfg.tol) {
      if (iterations_used) *iterations_used = k;
      return g;
    }
  }
  throw NumericalError("backward_adjoint: residual above " + std::to_string(cfg.tol) +
                       " after " + std::to_string(cfg.max_iter) +
                       " iterations; recent residuals:" + residual_trace(history));
}

DenseMatrix backward_adjoint(const NormalizedOperators& ops, const DenseMatrix& w,
                             const DenseMatrix& b, const DenseMatrix& z,
                             const DenseMatrix& grad_bar, Activation act,
                             const SolverConfig& cfg) {
  return backward_adjoint(ops, w, derivative_mask(ops, z, w, b, act), grad_bar, cfg);
}

ParamGradients param_gradients(const NormalizedOperators& ops, const DenseMatrix& z,
                               const DenseMatrix& g, const DenseMatrix& d_mask,
                               const DenseMatrix& x_hat) {
  const std::size_t nm = ops.a_block.rows;
  if (z.rows != nm || !g.same_shape(z) || !d_mask.same_shape(z))
    throw ValidationError("param_gradients: z, g, and mask must all be " +
                          std::to_string(nm) + " rows and one width");
  if (x_hat.rows != nm)
    throw ValidationError("param_gradients: x_hat must have " + std::to_string(nm) + " rows");

  const DenseMatrix m = hadamard(d_mask, g);
  ParamGradients out;
  out.grad_w = matmul_at_b(spmm(ops.a_block, z), m);
  out.grad_u = matmul_at_b(x_hat, m);
  out.grad_c = column_sums(m);
  return out;
}

}  // namespace ihnn
