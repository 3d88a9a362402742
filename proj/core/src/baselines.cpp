#include "ihnn/baselines.hpp"

#include <cmath>
#include <string>

#include "ihnn/errors.hpp"
#include "ihnn/operators.hpp"
#include "ihnn/rng.hpp"
#include "ihnn/training.hpp"

namespace ihnn {

namespace {

DenseMatrix uniform_matrix(std::size_t rows, std::size_t cols, double scale, Rng rng) {
  DenseMatrix m(rows, cols);
  for (double& x : m.values) x = rng.uniform(-scale, scale);
  return m;
}

void add_row_bias(DenseMatrix& m, const std::vector<double>& bias) {
  for (std::size_t i = 0; i < m.rows; ++i) {
    double* row = m.row_data(i);
    for (std::size_t j = 0; j < m.cols; ++j) row[j] += bias[j];
  }
}

void step_values(std::vector<double>& p, std::vector<double>& vel, const std::vector<double>& g,
                 double lr, double mu) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    vel[i] = mu * vel[i] - lr * g[i];
    p[i] += vel[i];
  }
}

DenseMatrix laplacian_apply(const SparseMatrix& l_ve, const SparseMatrix& l_ev,
                            const DenseMatrix& z) {
  return spmm(l_ve, spmm(l_ev, z));
}

}  // namespace

void BaselineConfig::validate() const {
  if (!(learning_rate >= 0.0))
    throw ValidationError("BaselineConfig: learning_rate must be >= 0");
  if (!(momentum >= 0.0 && momentum < 1.0))
    throw ValidationError("BaselineConfig: momentum must lie in [0, 1)");
  if (hidden_dim == 0) throw ValidationError("BaselineConfig: hidden width must be >= 1");
  if (layers == 0) throw ValidationError("BaselineConfig: need at least one layer");
}

HgnnModel init_hgnn(std::size_t d_in, std::size_t hidden, std::size_t classes,
                    std::size_t layers, Activation act, std::uint64_t seed) {
  if (d_in == 0 || hidden == 0 || classes == 0)
    throw ValidationError("init_hgnn: dimensions must be >= 1");
  if (layers == 0) throw ValidationError("init_hgnn: need at least one layer");

  Rng master(seed);
  HgnnModel model;
  model.activation = act;
  model.weights.reserve(layers);
  for (std::size_t i = 0; i < layers; ++i) {
    const std::size_t fan_in = i == 0 ? d_in : hidden;
    model.weights.push_back(uniform_matrix(fan_in, hidden,
                                           1.0 / std::sqrt(static_cast<double>(fan_in)),
                                           master.substream(i + 1)));
  }
  model.head_w = uniform_matrix(hidden, classes, 1.0 / std::sqrt(static_cast<double>(hidden)),
                                master.substream(100));
  model.head_b.assign(classes, 0.0);
  return model;
}

HgnnCache hgnn_forward(const SparseMatrix& l_ve, const SparseMatrix& l_ev,
                       const DenseMatrix& x, const HgnnModel& model) {
  if (model.weights.empty()) throw ValidationError("hgnn_forward: model has no layers");
  if (x.cols != model.weights[0].rows)
    throw ValidationError("hgnn_forward: feature width " + std::to_string(x.cols) +
                          " does not match the first layer's " +
                          std::to_string(model.weights[0].rows) + " inputs");

  HgnnCache cache;
  cache.z.push_back(x);
  for (std::size_t i = 0; i < model.weights.size(); ++i) {
    cache.lz.push_back(laplacian_apply(l_ve, l_ev, cache.z.back()));
    cache.pre.push_back(matmul(cache.lz.back(), model.weights[i]));
    DenseMatrix out = cache.pre.back();
    for (double& v : out.values) v = activate(model.activation, v);
    cache.z.push_back(std::move(out));
  }
  cache.logits = matmul(cache.z.back(), model.head_w);
  add_row_bias(cache.logits, model.head_b);
  return cache;
}

HgnnGradients hgnn_backprop(const SparseMatrix& l_ve, const SparseMatrix& l_ev,
                            const HgnnModel& model, const HgnnCache& cache,
                            const DenseMatrix& grad_logits) {
  const std::size_t layers = model.weights.size();
  if (cache.pre.size() != layers || cache.z.size() != layers + 1)
    throw ValidationError("hgnn_backprop: cache does not match the model");

  HgnnGradients grads;
  grads.weights.resize(layers);
  grads.head_w = matmul_at_b(cache.z.back(), grad_logits);
  grads.head_b = column_sums(grad_logits);

  DenseMatrix delta = matmul_a_bt(grad_logits, model.head_w);
  for (std::size_t i = layers; i-- > 0;) {
    DenseMatrix m = cache.pre[i];
    for (std::size_t k = 0; k < m.values.size(); ++k)
      m.values[k] = activate_derivative(model.activation, m.values[k]) * delta.values[k];
    grads.weights[i] = matmul_at_b(cache.lz[i], m);
    if (i > 0) delta = laplacian_apply(l_ve, l_ev, matmul_a_bt(m, model.weights[i]));
  }
  return grads;
}

MlpModel init_mlp(std::size_t d_in, std::size_t hidden, std::size_t classes,
                  Activation act, std::uint64_t seed) {
  if (hidden == 0) throw ValidationError("init_mlp: hidden width must be >= 1");
  if (d_in == 0 || classes == 0) throw ValidationError("init_mlp: dimensions must be >= 1");

  Rng master(seed);
  MlpModel model;
  model.activation = act;
  model.w1 = uniform_matrix(d_in, hidden, 1.0 / std::sqrt(static_cast<double>(d_in)),
                            master.substream(1));
  model.b1.assign(hidden, 0.0);
  model.w2 = uniform_matrix(hidden, classes, 1.0 / std::sqrt(static_cast<double>(hidden)),
                            master.substream(2));
  model.b2.assign(classes, 0.0);
  return model;
}

MlpCache mlp_forward(const DenseMatrix& x, const MlpModel& model) {
  if (x.cols != model.w1.rows)
    throw ValidationError("mlp_forward: feature width does not match the first layer");
  MlpCache cache;
  cache.pre = matmul(x, model.w1);
  add_row_bias(cache.pre, model.b1);
  cache.hidden = cache.pre;
  for (double& v : cache.hidden.values) v = activate(model.activation, v);
  cache.logits = matmul(cache.hidden, model.w2);
  add_row_bias(cache.logits, model.b2);
  return cache;
}

MlpGradients mlp_backprop(const DenseMatrix& x, const MlpModel& model,
                          const MlpCache& cache, const DenseMatrix& grad_logits) {
  MlpGradients grads;
  grads.w2 = matmul_at_b(cache.hidden, grad_logits);
  grads.b2 = column_sums(grad_logits);

  DenseMatrix m = matmul_a_bt(grad_logits, model.w2);
  for (std::size_t k = 0; k < m.values.size(); ++k)
    m.values[k] *= activate_derivative(model.activation, cache.pre.values[k]);
  grads.w1 = matmul_at_b(x, m);
  grads.b1 = column_sums(m);
  return grads;
}

namespace {

void check_labels(const Dataset& data) {
  const std::size_t n = data.hypergraph.node_count;
  if (data.labels.size() != n || data.train_mask.size() != n || data.test_mask.size() != n)
    throw ValidationError("baseline training: labels and masks must cover every node");
  if (data.class_count == 0) throw ValidationError("baseline training: dataset has no classes");
}

}  // namespace

HgnnModel train_hgnn(const Dataset& data, const BaselineConfig& cfg,
                     std::vector<double>* loss_curve) {
  cfg.validate();
  check_labels(data);

  const SparseMatrix l_ve = build_lve(data.hypergraph);
  const SparseMatrix l_ev = l_ve.transposed();
  HgnnModel model = init_hgnn(data.features.cols, cfg.hidden_dim, data.class_count, cfg.layers,
                              cfg.activation, Rng(cfg.seed).substream(21).state());

  std::vector<DenseMatrix> vel_w;
  for (const DenseMatrix& w : model.weights) vel_w.emplace_back(w.rows, w.cols);
  DenseMatrix vel_head(model.head_w.rows, model.head_w.cols);
  std::vector<double> vel_head_b(model.head_b.size(), 0.0);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const HgnnCache cache = hgnn_forward(l_ve, l_ev, data.features, model);
    const LogitsLoss ll = classification_loss(cache.logits, data.labels, data.train_mask);
    if (loss_curve) loss_curve->push_back(ll.loss);
    const HgnnGradients grads = hgnn_backprop(l_ve, l_ev, model, cache, ll.grad);
    for (std::size_t i = 0; i < model.weights.size(); ++i)
      step_values(model.weights[i].values, vel_w[i].values, grads.weights[i].values,
                  cfg.learning_rate, cfg.momentum);
    step_values(model.head_w.values, vel_head.values, grads.head_w.values,
                cfg.learning_rate, cfg.momentum);
    step_values(model.head_b, vel_head_b, grads.head_b, cfg.learning_rate, cfg.momentum);
  }
  return model;
}

MlpModel train_mlp(const Dataset& data, const BaselineConfig& cfg,
                   std::vector<double>* loss_curve) {
  cfg.validate();
  check_labels(data);

  MlpModel model = init_mlp(data.features.cols, cfg.hidden_dim, data.class_count,
                            cfg.activation, Rng(cfg.seed).substream(22).state());
  DenseMatrix vel_w1(model.w1.rows, model.w1.cols), vel_w2(model.w2.rows, model.w2.cols);
  std::vector<double> vel_b1(model.b1.size(), 0.0), vel_b2(model.b2.size(), 0.0);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const MlpCache cache = mlp_forward(data.features, model);
    const LogitsLoss ll = classification_loss(cache.logits, data.labels, data.train_mask);
    if (loss_curve) loss_curve->push_back(ll.loss);
    const MlpGradients grads = mlp_backprop(data.features, model, cache, ll.grad);
    step_values(model.w1.values, vel_w1.values, grads.w1.values, cfg.learning_rate, cfg.momentum);
    step_values(model.b1, vel_b1, grads.b1, cfg.learning_rate, cfg.momentum);
    step_values(model.w2.values, vel_w2.values, grads.w2.values, cfg.learning_rate, cfg.momentum);
    step_values(model.b2, vel_b2, grads.b2, cfg.learning_rate, cfg.momentum);
  }
  return model;
}

double evaluate_hgnn(const Dataset& data, const HgnnModel& model) {
  const SparseMatrix l_ve = build_lve(data.hypergraph);
  const SparseMatrix l_ev = l_ve.transposed();
  const HgnnCache cache = hgnn_forward(l_ve, l_ev, data.features, model);
  return masked_accuracy(cache.logits, data.labels, data.test_mask);
}

double evaluate_mlp(const Dataset& data, const MlpModel& model) {
  const MlpCache cache = mlp_forward(data.features, model);
  return masked_accuracy(cache.logits, data.labels, data.test_mask);
}

}  // namespace ihnn
