#include <cmath>
#include <vector>

#include "doctest.h"
#include "ihnn/baselines.hpp"
#include "ihnn/dataset.hpp"
#include "ihnn/errors.hpp"
#include "ihnn/model.hpp"
#include "ihnn/operators.hpp"
#include "oracles.hpp"

using ihnn::Activation;
using ihnn::DenseMatrix;
using ihnn::SparseMatrix;

TEST_SUITE_BEGIN("baselines");

TEST_CASE("identity layers apply powers of the Laplacian") {
  ihnn::Rng rng(3);
  const ihnn::Hypergraph hg = oracles::random_hypergraph(rng, 12, 15);
  const SparseMatrix lve = ihnn::build_lve(hg);
  const SparseMatrix lev = lve.transposed();
  const std::size_t d = 3;
  const DenseMatrix x = oracles::random_dense(rng, hg.node_count, d, 1.0);

  for (std::size_t layers : {1u, 2u, 4u}) {
    ihnn::HgnnModel model;
    model.activation = Activation::identity;
    for (std::size_t i = 0; i < layers; ++i) {
      DenseMatrix eye(d, d);
      for (std::size_t j = 0; j < d; ++j) eye(j, j) = 1.0;
      model.weights.push_back(eye);
    }
    model.head_w = DenseMatrix(d, 2);
    model.head_b = {0.0, 0.0};

    const ihnn::HgnnCache cache = ihnn::hgnn_forward(lve, lev, x, model);
    const DenseMatrix laplacian =
        oracles::dense_matmul(lve.to_dense(), lev.to_dense());
    DenseMatrix want = x;
    for (std::size_t i = 0; i < layers; ++i) want = oracles::dense_matmul(laplacian, want);
    CHECK(ihnn::max_abs_diff(cache.z.back(), want) <= 1e-10);
  }
}

TEST_CASE("single relu layer with identity weight is the propagated input") {
  const ihnn::Hypergraph hg = ihnn::build_hypergraph(3, {{0, 1}, {1, 2}});
  const SparseMatrix lve = ihnn::build_lve(hg);
  const SparseMatrix lev = lve.transposed();
  DenseMatrix x(3, 2);
  x(0, 0) = 1.0;
  x(1, 1) = 2.0;
  x(2, 0) = 0.5;

  ihnn::HgnnModel model;
  model.activation = Activation::relu;
  DenseMatrix eye(2, 2);
  eye(0, 0) = eye(1, 1) = 1.0;
  model.weights = {eye};
  ihnn::Rng rng(8);
  model.head_w = oracles::random_dense(rng, 2, 2, 1.0);
  model.head_b = {0.3, -0.6};

  const ihnn::HgnnCache cache = ihnn::hgnn_forward(lve, lev, x, model);
  const DenseMatrix lx =
      oracles::dense_matmul(oracles::dense_matmul(lve.to_dense(), lev.to_dense()), x);
  const DenseMatrix want = oracles::dense_matmul(lx, model.head_w);
  for (std::size_t v = 0; v < 3; ++v)
    for (std::size_t c = 0; c < 2; ++c)
      CHECK(cache.logits(v, c) ==
            doctest::Approx(want(v, c) + model.head_b[c]).epsilon(1e-12));
}

TEST_CASE("zero input yields bias logits") {
  const ihnn::Hypergraph hg = ihnn::build_hypergraph(2, {{0, 1}});
  const SparseMatrix lve = ihnn::build_lve(hg);
  const ihnn::HgnnModel model = ihnn::init_hgnn(3, 4, 2, 2, Activation::relu, 5);
  const ihnn::HgnnCache cache =
      ihnn::hgnn_forward(lve, lve.transposed(), DenseMatrix(2, 3), model);
  for (std::size_t v = 0; v < 2; ++v)
    for (std::size_t c = 0; c < 2; ++c) CHECK(cache.logits(v, c) == model.head_b[c]);

  const ihnn::MlpModel mlp = ihnn::init_mlp(3, 4, 2, Activation::relu, 5);
  const ihnn::MlpCache mcache = ihnn::mlp_forward(DenseMatrix(2, 3), mlp);
  for (std::size_t v = 0; v < 2; ++v)
    for (std::size_t c = 0; c < 2; ++c) CHECK(mcache.logits(v, c) == mlp.b2[c]);
}

TEST_CASE("hgnn backprop matches finite differences") {
  ihnn::Rng rng(71);
  const ihnn::Hypergraph hg = oracles::random_hypergraph(rng, 8, 8);
  const SparseMatrix lve = ihnn::build_lve(hg);
  const SparseMatrix lev = lve.transposed();
  const DenseMatrix x = oracles::random_dense(rng, hg.node_count, 3, 1.0);
  std::vector<std::size_t> labels(hg.node_count);
  std::vector<std::uint8_t> mask(hg.node_count, 1);
  for (std::size_t v = 0; v < hg.node_count; ++v) labels[v] = rng.uniform_int(2);

  ihnn::HgnnModel model = ihnn::init_hgnn(3, 4, 2, 3, Activation::sigmoid, 9);

  auto loss_of = [&](const ihnn::HgnnModel& m) {
    const ihnn::HgnnCache cache = ihnn::hgnn_forward(lve, lev, x, m);
    return ihnn::classification_loss(cache.logits, labels, mask).loss;
  };
  const ihnn::HgnnCache cache = ihnn::hgnn_forward(lve, lev, x, model);
  const ihnn::LogitsLoss loss = ihnn::classification_loss(cache.logits, labels, mask);
  const ihnn::HgnnGradients grads = ihnn::hgnn_backprop(lve, lev, model, cache, loss.grad);

  const double eps = 1e-6;
  REQUIRE(grads.weights.size() == 3);
  for (std::size_t layer = 0; layer < 3; ++layer)
    for (std::size_t i = 0; i < model.weights[layer].values.size(); ++i) {
      ihnn::HgnnModel lo = model, hi = model;
      lo.weights[layer].values[i] -= eps;
      hi.weights[layer].values[i] += eps;
      const double fd = (loss_of(hi) - loss_of(lo)) / (2.0 * eps);
      CHECK(grads.weights[layer].values[i] == doctest::Approx(fd).epsilon(2e-5));
    }
  for (std::size_t i = 0; i < model.head_w.values.size(); ++i) {
    ihnn::HgnnModel lo = model, hi = model;
    lo.head_w.values[i] -= eps;
    hi.head_w.values[i] += eps;
    const double fd = (loss_of(hi) - loss_of(lo)) / (2.0 * eps);
    CHECK(grads.head_w.values[i] == doctest::Approx(fd).epsilon(2e-5));
  }
  for (std::size_t i = 0; i < model.head_b.size(); ++i) {
    ihnn::HgnnModel lo = model, hi = model;
    lo.head_b[i] -= eps;
    hi.head_b[i] += eps;
    const double fd = (loss_of(hi) - loss_of(lo)) / (2.0 * eps);
    CHECK(grads.head_b[i] == doctest::Approx(fd).epsilon(2e-5));
  }
}

TEST_CASE("mlp backprop matches finite differences") {
  ihnn::Rng rng(13);
  const DenseMatrix x = oracles::random_dense(rng, 6, 3, 1.0);
  std::vector<std::size_t> labels = {0, 1, 1, 0, 1, 0};
  std::vector<std::uint8_t> mask = {1, 1, 0, 1, 1, 1};
  ihnn::MlpModel model = ihnn::init_mlp(3, 5, 2, Activation::sigmoid, 21);

  auto loss_of = [&](const ihnn::MlpModel& m) {
    return ihnn::classification_loss(ihnn::mlp_forward(x, m).logits, labels, mask).loss;
  };
  const ihnn::MlpCache cache = ihnn::mlp_forward(x, model);
  const ihnn::LogitsLoss loss = ihnn::classification_loss(cache.logits, labels, mask);
  const ihnn::MlpGradients grads = ihnn::mlp_backprop(x, model, cache, loss.grad);

  const double eps = 1e-6;
  auto check_block = [&](const std::vector<double>& got, std::vector<double>& live) {
    for (std::size_t i = 0; i < got.size(); ++i) {
      const double keep = live[i];
      live[i] = keep - eps;
      const double lo = loss_of(model);
      live[i] = keep + eps;
      const double hi = loss_of(model);
      live[i] = keep;
      CHECK(got[i] == doctest::Approx((hi - lo) / (2.0 * eps)).epsilon(2e-5));
    }
  };
  check_block(grads.w1.values, model.w1.values);
  check_block(grads.b1, model.b1);
  check_block(grads.w2.values, model.w2.values);
  check_block(grads.b2, model.b2);
}

TEST_CASE("config validation rejects a zero-width hidden layer") {
  ihnn::BaselineConfig cfg;
  cfg.hidden_dim = 0;
  CHECK_THROWS_AS(cfg.validate(), ihnn::ValidationError);
  CHECK_THROWS_AS(ihnn::init_mlp(3, 0, 2, Activation::relu, 1), ihnn::ValidationError);
  cfg = {};
  cfg.layers = 0;
  CHECK_THROWS_AS(cfg.validate(), ihnn::ValidationError);
}

TEST_CASE("zero learning rate leaves both baselines at initialization") {
  ihnn::SynthConfig synth;
  synth.nodes = 30;
  synth.communities = 2;
  synth.edges = 20;
  synth.mean_edge_size = 3.0;
  synth.feature_dim = 4;
  synth.seed = 2;
  const ihnn::Dataset data = ihnn::generate_synthetic(synth);

  ihnn::BaselineConfig cfg;
  cfg.epochs = 4;
  cfg.learning_rate = 0.0;
  cfg.hidden_dim = 5;
  cfg.seed = 33;

  ihnn::BaselineConfig frozen = cfg;
  frozen.epochs = 0;
  const ihnn::HgnnModel trained = ihnn::train_hgnn(data, cfg);
  const ihnn::HgnnModel init = ihnn::train_hgnn(data, frozen);
  REQUIRE(trained.weights.size() == init.weights.size());
  for (std::size_t i = 0; i < trained.weights.size(); ++i)
    CHECK(trained.weights[i].values == init.weights[i].values);
  CHECK(trained.head_w.values == init.head_w.values);

  const ihnn::MlpModel m1 = ihnn::train_mlp(data, cfg);
  const ihnn::MlpModel m0 = ihnn::train_mlp(data, frozen);
  CHECK(m1.w1.values == m0.w1.values);
  CHECK(m1.w2.values == m0.w2.values);
}

TEST_CASE("informative features let the mlp solve the easy dataset") {
  ihnn::SynthConfig synth;
  synth.nodes = 100;
  synth.communities = 2;
  synth.edges = 60;
  synth.mean_edge_size = 3.0;
  synth.impurity = 0.0;
  synth.informative_fraction = 1.0;
  synth.feature_dim = 8;
  synth.noise_scale = 0.2;
  synth.train_ratio = 0.5;
  synth.seed = 6;
  const ihnn::Dataset data = ihnn::generate_synthetic(synth);

  ihnn::BaselineConfig cfg;
  cfg.epochs = 200;
  cfg.learning_rate = 0.2;
  cfg.hidden_dim = 8;
  cfg.seed = 1;
  std::vector<double> curve;
  const ihnn::MlpModel model = ihnn::train_mlp(data, cfg, &curve);
  REQUIRE(curve.size() == 200);
  CHECK(curve.back() < curve.front());
  CHECK(ihnn::evaluate_mlp(data, model) >= 0.95);
}

TEST_CASE("structure carries labels the mlp cannot see") {
  ihnn::SynthConfig synth;
  synth.nodes = 100;
  synth.communities = 2;
  synth.edges = 600;
  synth.mean_edge_size = 4.0;
  synth.impurity = 0.0;
  synth.informative_fraction = 0.1;
  synth.feature_dim = 8;
  synth.noise_scale = 0.2;
  synth.train_ratio = 0.5;
  synth.seed = 12;
  const ihnn::Dataset data = ihnn::generate_synthetic(synth);

  ihnn::BaselineConfig cfg;
  cfg.epochs = 200;
  cfg.learning_rate = 0.2;
  cfg.hidden_dim = 8;
  cfg.layers = 2;
  cfg.seed = 1;
  const double hgnn_acc = ihnn::evaluate_hgnn(data, ihnn::train_hgnn(data, cfg));
  const double mlp_acc = ihnn::evaluate_mlp(data, ihnn::train_mlp(data, cfg));
  CHECK(hgnn_acc >= mlp_acc + 0.10);
}

TEST_SUITE_END();
