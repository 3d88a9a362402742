#include <cmath>
#include <vector>

#include "doctest.h"
#include "ihnn/equilibrium.hpp"
#include "ihnn/errors.hpp"
#include "ihnn/operators.hpp"
#include "oracles.hpp"

using ihnn::Activation;
using ihnn::DenseMatrix;
using ihnn::SparseMatrix;

namespace {

// A 2x2 exchange operator standing in for a one-node, one-edge system.
ihnn::NormalizedOperators exchange_operator() {
  ihnn::NormalizedOperators ops;
  ops.l_ve = SparseMatrix::identity(1);
  ops.a_block = SparseMatrix::from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}});
  ops.opnorm_a = 1.0;
  ops.kappa_radius = 0.95;
  return ops;
}

}  // namespace

TEST_SUITE_BEGIN("equilibrium");

TEST_CASE("activations and their derivatives") {
  CHECK(ihnn::activate(Activation::relu, -2.0) == 0.0);
  CHECK(ihnn::activate(Activation::relu, 3.0) == 3.0);
  CHECK(ihnn::activate_derivative(Activation::relu, 0.0) == 0.0);
  CHECK(ihnn::activate_derivative(Activation::relu, 1e-9) == 1.0);

  CHECK(ihnn::activate(Activation::sigmoid, 0.0) == 0.5);
  const double s = ihnn::activate(Activation::sigmoid, 1.3);
  CHECK(ihnn::activate_derivative(Activation::sigmoid, 1.3) ==
        doctest::Approx(s * (1.0 - s)).epsilon(1e-12));
  CHECK(ihnn::activate(Activation::sigmoid, -40.0) == doctest::Approx(0.0).epsilon(1e-15));

  CHECK(ihnn::activate(Activation::identity, -7.5) == -7.5);
  CHECK(ihnn::activate_derivative(Activation::identity, 123.0) == 1.0);
}

TEST_CASE("activation names round-trip") {
  for (Activation a : {Activation::relu, Activation::sigmoid, Activation::identity})
    CHECK(ihnn::parse_activation(ihnn::activation_name(a)) == a);
  CHECK_THROWS_AS(ihnn::parse_activation("tanh"), ihnn::ValidationError);
}

TEST_CASE("zero weight fixes the point at sigma(B) in two iterations") {
  const ihnn::NormalizedOperators ops = exchange_operator();
  const DenseMatrix w(1, 1);
  const DenseMatrix b{{1.5}, {2.5}};
  const ihnn::EmbeddingState state =
      ihnn::forward_fixed_point(ops, w, b, Activation::relu);
  CHECK(state.iterations_used == 2);
  CHECK(state.final_residual == 0.0);
  CHECK(state.z(0, 0) == 1.5);
  CHECK(state.z(1, 0) == 2.5);
}

TEST_CASE("scalar exchange system converges to two") {
  const ihnn::NormalizedOperators ops = exchange_operator();
  const DenseMatrix w{{0.5}};
  const DenseMatrix b{{1.0}, {1.0}};
  const ihnn::EmbeddingState state =
      ihnn::forward_fixed_point(ops, w, b, Activation::relu, {1e-10, 500});
  CHECK(state.z(0, 0) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(state.z(1, 0) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("negative bias under relu collapses to zero") {
  const ihnn::NormalizedOperators ops = exchange_operator();
  const DenseMatrix w{{0.5}};
  const DenseMatrix b{{-1.0}, {-1.0}};
  const ihnn::EmbeddingState state =
      ihnn::forward_fixed_point(ops, w, b, Activation::relu);
  CHECK(ihnn::max_abs(state.z) == 0.0);
}

TEST_CASE("contraction violations and bad inputs are rejected") {
  const ihnn::NormalizedOperators ops = exchange_operator();
  const DenseMatrix b{{1.0}, {1.0}};
  CHECK_THROWS_AS(ihnn::forward_fixed_point(ops, DenseMatrix{{2.0}}, b, Activation::relu),
                  ihnn::ValidationError);
  CHECK_THROWS_AS(ihnn::forward_fixed_point(ops, DenseMatrix{{1.0}}, b, Activation::relu),
                  ihnn::ValidationError);
  CHECK_THROWS_AS(
      ihnn::forward_fixed_point(ops, DenseMatrix(2, 1), b, Activation::relu),
      ihnn::ValidationError);
  DenseMatrix bad = b;
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(ihnn::forward_fixed_point(ops, DenseMatrix{{0.5}}, bad, Activation::relu),
                  ihnn::ValidationError);
}

TEST_CASE("iteration cap raises a numerical error with a residual trace") {
  const ihnn::NormalizedOperators ops = exchange_operator();
  const DenseMatrix w{{0.9}};
  const DenseMatrix b{{1.0}, {1.0}};
  CHECK_THROWS_AS(ihnn::forward_fixed_point(ops, w, b, Activation::relu, {1e-12, 3}),
                  ihnn::NumericalError);
}

TEST_CASE("residuals decay geometrically and starts agree") {
  ihnn::Rng rng(404);
  for (int rep = 0; rep < 20; ++rep) {
    const ihnn::Hypergraph hg = oracles::random_hypergraph(rng, 25, 30);
    const double kappa = rng.uniform(0.3, 0.8);
    const ihnn::NormalizedOperators ops = ihnn::build_block_operator(hg, kappa);
    const std::size_t d = 4 + rng.uniform_int(5);
    const DenseMatrix w = oracles::random_contractive_w(rng, d, ops.opnorm_a, kappa, 0.7);
    const DenseMatrix b = oracles::random_dense(rng, ops.a_block.rows, d, 2.0);
    const Activation act = rep % 2 ? Activation::relu : Activation::sigmoid;

    const double tol = 1e-9;
    const ihnn::EmbeddingState state = ihnn::forward_fixed_point(ops, w, b, act, {tol, 2000});
    for (std::size_t k = 0; k + 1 < state.residual_history.size(); ++k)
      CHECK(state.residual_history[k + 1] <= 0.95 * state.residual_history[k] + 1e-14);

    DenseMatrix start = oracles::random_dense(rng, ops.a_block.rows, d, 3.0);
    const ihnn::EmbeddingState other =
        ihnn::forward_fixed_point(ops, w, b, act, {tol, 2000}, &start);
    CHECK(ihnn::max_abs_diff(state.z, other.z) <= 10.0 * tol);
  }
}

TEST_CASE("adjoint solution is the bias gradient") {
  // With loss sum(c . z), the adjoint g satisfies dLoss/dB = mask . g.
  ihnn::Rng rng(808);
  for (int rep = 0; rep < 5; ++rep) {
    const ihnn::Hypergraph hg = oracles::random_hypergraph(rng, 8, 8);
    const ihnn::NormalizedOperators ops = ihnn::build_block_operator(hg, 0.8);
    const std::size_t d = 3;
    const DenseMatrix w = oracles::random_contractive_w(rng, d, ops.opnorm_a, 0.8);
    const DenseMatrix b = oracles::random_dense(rng, ops.a_block.rows, d, 1.0);
    const DenseMatrix c = oracles::random_dense(rng, ops.a_block.rows, d, 1.0);

    const ihnn::SolverConfig tight{1e-13, 5000};
    const ihnn::EmbeddingState state =
        ihnn::forward_fixed_point(ops, w, b, Activation::sigmoid, tight);
    const DenseMatrix mask = ihnn::derivative_mask(ops, state.z, w, b, Activation::sigmoid);
    std::size_t adjoint_iters = 0;
    const DenseMatrix g = ihnn::backward_adjoint(ops, w, mask, c, tight, &adjoint_iters);
    CHECK(adjoint_iters > 0);
    const DenseMatrix bias_grad = ihnn::hadamard(mask, g);

    auto loss_at = [&](const DenseMatrix& bias) {
      const ihnn::EmbeddingState s =
          ihnn::forward_fixed_point(ops, w, bias, Activation::sigmoid, tight);
      double total = 0.0;
      for (std::size_t i = 0; i < s.z.values.size(); ++i) total += c.values[i] * s.z.values[i];
      return total;
    };
    ihnn::Rng pick(900 + rep);
    for (int probe = 0; probe < 6; ++probe) {
      const std::size_t i = pick.uniform_int(b.values.size());
      const double eps = 1e-6;
      DenseMatrix lo = b, hi = b;
      lo.values[i] -= eps;
      hi.values[i] += eps;
      const double fd = (loss_at(hi) - loss_at(lo)) / (2.0 * eps);
      CHECK(bias_grad.values[i] == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("parameter gradients match finite differences") {
  ihnn::Rng rng(909);
  for (int rep = 0; rep < 5; ++rep) {
    const ihnn::Hypergraph hg = oracles::random_hypergraph(rng, 7, 6);
    const ihnn::NormalizedOperators ops = ihnn::build_block_operator(hg, 0.7);
    const std::size_t d = 2, d_in = 3;
    DenseMatrix w = oracles::random_contractive_w(rng, d, ops.opnorm_a, 0.7);
    DenseMatrix u = oracles::random_dense(rng, d_in, d, 0.6);
    std::vector<double> cvec(d);
    for (double& x : cvec) x = rng.uniform(-0.4, 0.4);
    const DenseMatrix x_hat = oracles::random_dense(rng, ops.a_block.rows, d_in, 1.0);
    const DenseMatrix cost = oracles::random_dense(rng, ops.a_block.rows, d, 1.0);

    const ihnn::SolverConfig tight{1e-13, 5000};
    auto bias_of = [&](const DenseMatrix& uu, const std::vector<double>& cc) {
      DenseMatrix bias = ihnn::matmul(x_hat, uu);
      for (std::size_t i = 0; i < bias.rows; ++i)
        for (std::size_t j = 0; j < bias.cols; ++j) bias(i, j) += cc[j];
      return bias;
    };
    auto loss_of = [&](const DenseMatrix& ww, const DenseMatrix& uu,
                       const std::vector<double>& cc) {
      const ihnn::EmbeddingState s = ihnn::forward_fixed_point(
          ops, ww, bias_of(uu, cc), Activation::sigmoid, tight);
      double total = 0.0;
      for (std::size_t i = 0; i < s.z.values.size(); ++i)
        total += cost.values[i] * s.z.values[i];
      return total;
    };

    const DenseMatrix b = bias_of(u, cvec);
    const ihnn::EmbeddingState state =
        ihnn::forward_fixed_point(ops, w, b, Activation::sigmoid, tight);
    const DenseMatrix mask = ihnn::derivative_mask(ops, state.z, w, b, Activation::sigmoid);
    const DenseMatrix g = ihnn::backward_adjoint(ops, w, mask, cost, tight);
    const ihnn::ParamGradients grads = ihnn::param_gradients(ops, state.z, g, mask, x_hat);

    const double eps = 1e-6;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        DenseMatrix lo = w, hi = w;
        lo(i, j) -= eps;
        hi(i, j) += eps;
        const double fd = (loss_of(hi, u, cvec) - loss_of(lo, u, cvec)) / (2.0 * eps);
        CHECK(grads.grad_w(i, j) == doctest::Approx(fd).epsilon(5e-5));
      }
    for (std::size_t i = 0; i < d_in; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        DenseMatrix lo = u, hi = u;
        lo(i, j) -= eps;
        hi(i, j) += eps;
        const double fd = (loss_of(w, hi, cvec) - loss_of(w, lo, cvec)) / (2.0 * eps);
        CHECK(grads.grad_u(i, j) == doctest::Approx(fd).epsilon(5e-5));
      }
    for (std::size_t j = 0; j < d; ++j) {
      std::vector<double> lo = cvec, hi = cvec;
      lo[j] -= eps;
      hi[j] += eps;
      const double fd = (loss_of(w, u, hi) - loss_of(w, u, lo)) / (2.0 * eps);
      CHECK(grads.grad_c[j] == doctest::Approx(fd).epsilon(5e-5));
    }
  }
}

TEST_CASE("alternating updates reach the block fixed point") {
  ihnn::Rng rng(515);
  for (int rep = 0; rep < 15; ++rep) {
    const ihnn::Hypergraph hg = oracles::random_hypergraph(rng, 12, 14);
    const ihnn::NormalizedOperators ops = ihnn::build_block_operator(hg, 0.8);
    const std::size_t d = 3;
    const DenseMatrix w = oracles::random_contractive_w(rng, d, ops.opnorm_a, 0.8);
    const DenseMatrix b = oracles::random_dense(rng, ops.a_block.rows, d, 1.5);
    const Activation act = rep % 2 ? Activation::relu : Activation::sigmoid;

    const ihnn::EmbeddingState block =
        ihnn::forward_fixed_point(ops, w, b, act, {1e-14, 20000});
    const DenseMatrix seq =
        oracles::coupled_fixed_point(ops.l_ve, w, b, act, 1e-14, 20000, false);
    CHECK(ihnn::max_abs_diff(block.z, seq) <= 1e-12);
  }
}

TEST_CASE("block iteration equals jacobi-sequenced coupled iteration bitwise") {
  ihnn::Rng rng(1717);
  const ihnn::Hypergraph hg = oracles::random_hypergraph(rng, 10, 12);
  const ihnn::NormalizedOperators ops = ihnn::build_block_operator(hg, 0.8);
  const DenseMatrix w = oracles::random_contractive_w(rng, 3, ops.opnorm_a, 0.8);
  const DenseMatrix b = oracles::random_dense(rng, ops.a_block.rows, 3, 1.0);

  DenseMatrix z(ops.a_block.rows, 3);
  for (int k = 0; k < 25; ++k) z = ihnn::equilibrium_step(ops, z, w, b, Activation::relu);
  const DenseMatrix coupled =
      oracles::coupled_fixed_point(ops.l_ve, w, b, Activation::relu, 0.0, 25, true);
  CHECK(ihnn::max_abs_diff(z, coupled) == 0.0);
}

TEST_SUITE_END();
