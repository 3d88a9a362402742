#include "ihnn/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "ihnn/errors.hpp"
#include "ihnn/linalg.hpp"

namespace ihnn {

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0))
    throw ValidationError("TrainConfig: learning_rate must be >= 0");
  if (!(momentum >= 0.0 && momentum < 1.0))
    throw ValidationError("TrainConfig: momentum must lie in [0, 1)");
  if (!(gamma >= 0.0)) throw ValidationError("TrainConfig: gamma must be >= 0");
  if (!(kappa > 0.0 && kappa < 1.0))
    throw ValidationError("TrainConfig: kappa must lie in (0, 1)");
  if (!(forward.tol > 0.0) || forward.max_iter == 0)
    throw ValidationError("TrainConfig: forward solver needs tol > 0 and max_iter >= 1");
  if (!(backward.tol > 0.0) || backward.max_iter == 0)
    throw ValidationError("TrainConfig: backward solver needs tol > 0 and max_iter >= 1");
  if (batch_size == 0) throw ValidationError("TrainConfig: batch_size must be >= 1");
  if (embed_dim == 0) throw ValidationError("TrainConfig: embed_dim must be >= 1");
  if (!(val_fraction >= 0.0 && val_fraction < 1.0))
    throw ValidationError("TrainConfig: val_fraction must lie in [0, 1)");
  if (!(train_ratio > 0.0 && train_ratio < 1.0))
    throw ValidationError("TrainConfig: train_ratio must lie in (0, 1)");
}

ModelParams init_params(std::size_t d_in, std::size_t d, std::size_t classes,
                        double kappa_radius, std::uint64_t seed) {
  if (d_in == 0 || d == 0 || classes == 0)
    throw ValidationError("init_params: dimensions must be >= 1");
  if (!(kappa_radius > 0.0))
    throw ValidationError("init_params: kappa_radius must be positive");

  Rng master(seed);
  ModelParams p;

  p.w = DenseMatrix(d, d);
  Rng w_rng = master.substream(1);
  const double w_scale = kappa_radius / static_cast<double>(d);
  for (double& x : p.w.values) x = w_rng.uniform(-w_scale, w_scale);
  project_rows_l1_inplace(p.w, kappa_radius);

  p.u = DenseMatrix(d_in, d);
  Rng u_rng = master.substream(2);
  const double u_scale = 1.0 / std::sqrt(static_cast<double>(d_in));
  for (double& x : p.u.values) x = u_rng.uniform(-u_scale, u_scale);
  p.c.assign(d, 0.0);

  const double head_scale = 1.0 / std::sqrt(static_cast<double>(2 * d));
  p.theta_w = DenseMatrix(2 * d, classes);
  Rng t_rng = master.substream(3);
  for (double& x : p.theta_w.values) x = t_rng.uniform(-head_scale, head_scale);
  p.theta_b.assign(classes, 0.0);

  p.phi_w.resize(2 * d);
  Rng f_rng = master.substream(4);
  for (double& x : p.phi_w) x = f_rng.uniform(-head_scale, head_scale);
  p.phi_b = 0.0;
  return p;
}

double masked_accuracy(const DenseMatrix& logits, const std::vector<std::size_t>& labels,
                       const std::vector<std::uint8_t>& mask) {
  std::size_t total = 0, hits = 0;
  for (std::size_t v = 0; v < logits.rows; ++v) {
    if (!mask[v]) continue;
    const double* row = logits.row_data(v);
    std::size_t best = 0;
    for (std::size_t j = 1; j < logits.cols; ++j)
      if (row[j] > row[best]) best = j;
    ++total;
    hits += best == labels[v] ? 1 : 0;
  }
  if (total == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(hits) / static_cast<double>(total);
}

namespace {

void step_values(std::vector<double>& p, std::vector<double>& vel, const std::vector<double>& g,
                 double lr, double mu) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    vel[i] = mu * vel[i] - lr * g[i];
    p[i] += vel[i];
  }
}

}  // namespace

Trainer::Trainer(const Dataset& data, const NormalizedOperators& ops, const TrainConfig& cfg)
    : data_(data), ops_(ops), cfg_(cfg), sampler_rng_(Rng(cfg.seed).substream(10)) {
  cfg_.validate();
  const std::size_t n = data.hypergraph.node_count;
  if (data.labels.size() != n || data.train_mask.size() != n)
    throw ValidationError("Trainer: labels and masks must cover every node");
  if (ops.l_ve.rows != n || ops.l_ve.cols != data.hypergraph.edge_count())
    throw ValidationError("Trainer: operators do not match the dataset's hypergraph");
  if (data.class_count == 0) throw ValidationError("Trainer: dataset has no classes");

  x_hat_ = stacked_features(data.hypergraph, data.features);
  params_ = init_params(data.features.cols, cfg_.embed_dim, data.class_count,
                        cfg_.kappa / ops.opnorm_a, Rng(cfg_.seed).substream(11).state());

  train_core_ = data.train_mask;
  val_mask_.assign(n, 0);
  std::vector<std::size_t> train_nodes;
  for (std::size_t v = 0; v < n; ++v)
    if (data.train_mask[v]) train_nodes.push_back(v);
  const std::size_t val_count = static_cast<std::size_t>(
      std::floor(cfg_.val_fraction * static_cast<double>(train_nodes.size())));
  if (val_count > 0) {
    Rng val_rng = Rng(cfg_.seed).substream(12);
    for (std::size_t i = train_nodes.size() - 1; i > 0; --i)
      std::swap(train_nodes[i], train_nodes[val_rng.uniform_int(i + 1)]);
    for (std::size_t i = 0; i < val_count; ++i) {
      val_mask_[train_nodes[i]] = 1;
      train_core_[train_nodes[i]] = 0;
    }
  }
  if (std::none_of(train_core_.begin(), train_core_.end(), [](std::uint8_t m) { return m != 0; }))
    throw ValidationError("Trainer: validation holdout leaves no training nodes");

  const std::size_t d = cfg_.embed_dim;
  vel_w_ = DenseMatrix(d, d);
  vel_u_ = DenseMatrix(x_hat_.cols, d);
  vel_theta_w_ = DenseMatrix(2 * d, data.class_count);
  vel_c_.assign(d, 0.0);
  vel_theta_b_.assign(data.class_count, 0.0);
  vel_phi_w_.assign(2 * d, 0.0);
}

EpochRecord Trainer::train_epoch() {
  const auto t0 = std::chrono::steady_clock::now();
  const double radius = cfg_.kappa / ops_.opnorm_a;
  try {
    const DenseMatrix b = affine_bias(x_hat_, params_.u, params_.c);
    const EmbeddingState state =
        forward_fixed_point(ops_, params_.w, b, cfg_.activation, cfg_.forward);
    const MembershipBatch batch =
        sample_membership(data_.hypergraph, cfg_.batch_size, sampler_rng_);
    const HeadGradients heads = head_gradients(data_.hypergraph, state.z, data_.labels,
                                               train_core_, batch, params_, cfg_.gamma);
    const DenseMatrix d_mask = derivative_mask(ops_, state.z, params_.w, b, cfg_.activation);
    std::size_t backward_iters = 0;
    const DenseMatrix g =
        backward_adjoint(ops_, params_.w, d_mask, heads.grad_z, cfg_.backward, &backward_iters);
    const ParamGradients pg = param_gradients(ops_, state.z, g, d_mask, x_hat_);

    const double lr = cfg_.learning_rate;
    const double mu = cfg_.momentum;
    step_values(params_.w.values, vel_w_.values, pg.grad_w.values, lr, mu);
    step_values(params_.u.values, vel_u_.values, pg.grad_u.values, lr, mu);
    step_values(params_.c, vel_c_, pg.grad_c, lr, mu);
    step_values(params_.theta_w.values, vel_theta_w_.values, heads.grad_theta_w.values, lr, mu);
    step_values(params_.theta_b, vel_theta_b_, heads.grad_theta_b, lr, mu);
    step_values(params_.phi_w, vel_phi_w_, heads.grad_phi_w, lr, mu);
    vel_phi_b_ = mu * vel_phi_b_ - lr * heads.grad_phi_b;
    params_.phi_b += vel_phi_b_;
    project_rows_l1_inplace(params_.w, radius);

    EpochRecord rec;
    rec.loss_cls = heads.loss_cls;
    rec.loss_memb = heads.loss_memb;
    rec.loss_total = heads.loss_cls + cfg_.gamma * heads.loss_memb;
    rec.train_acc = masked_accuracy(heads.logits, data_.labels, train_core_);
    rec.val_acc = masked_accuracy(heads.logits, data_.labels, val_mask_);
    rec.forward_iters = state.iterations_used;
    rec.backward_iters = backward_iters;
    ++epoch_index_;
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
  } catch (const NumericalError& err) {
    throw NumericalError("epoch " + std::to_string(epoch_index_) + ": " + err.what());
  }
}

TrainReport Trainer::train() {
  TrainReport report;
  report.epochs.reserve(cfg_.epochs);
  for (std::size_t t = 0; t < cfg_.epochs; ++t) report.epochs.push_back(train_epoch());
  report.final_params = params_;
  return report;
}

double gradient_check(const Dataset& data, const NormalizedOperators& ops,
                      const TrainConfig& cfg, double epsilon) {
  cfg.validate();
  if (!(epsilon > 0.0)) throw ValidationError("gradient_check: epsilon must be positive");
  const std::size_t d = cfg.embed_dim;
  const std::size_t d_in = data.features.cols;
  const std::size_t classes = data.class_count;
  const std::size_t total =
      d * d + d_in * d + d + 2 * d * classes + classes + 2 * d + 1;
  if (total > 5000)
    throw ValidationError("gradient_check: " + std::to_string(total) +
                          " parameters exceed the 5000 limit for the dense sweep");

  ModelParams params = init_params(d_in, d, classes, cfg.kappa / ops.opnorm_a,
                                   Rng(cfg.seed).substream(11).state());
  Rng sampler = Rng(cfg.seed).substream(10);
  const MembershipBatch batch = sample_membership(data.hypergraph, cfg.batch_size, sampler);

  const SolverConfig fwd{1e-12, 5000};
  const SolverConfig bwd{1e-12, 5000};
  const DenseMatrix x_hat = stacked_features(data.hypergraph, data.features);

  auto loss_at = [&](const ModelParams& p) {
    const DenseMatrix b = affine_bias(x_hat, p.u, p.c);
    const EmbeddingState st = forward_fixed_point(ops, p.w, b, cfg.activation, fwd);
    const HeadGradients h = head_gradients(data.hypergraph, st.z, data.labels,
                                           data.train_mask, batch, p, cfg.gamma);
    return h.loss_cls + cfg.gamma * h.loss_memb;
  };

  const DenseMatrix b = affine_bias(x_hat, params.u, params.c);
  const EmbeddingState st = forward_fixed_point(ops, params.w, b, cfg.activation, fwd);
  if (cfg.activation == Activation::relu) {
    const DenseMatrix pre = preactivation(ops, st.z, params.w, b);
    double margin = std::numeric_limits<double>::infinity();
    for (double x : pre.values) margin = std::min(margin, std::abs(x));
    if (margin < 1e-3)
      throw NumericalError("gradient_check: a pre-activation sits " + std::to_string(margin) +
                           " from the kink; finite differences need 1e-3, re-seed the instance");
  }
  const HeadGradients heads = head_gradients(data.hypergraph, st.z, data.labels,
                                             data.train_mask, batch, params, cfg.gamma);
  const DenseMatrix d_mask = derivative_mask(ops, st.z, params.w, b, cfg.activation);
  const DenseMatrix g = backward_adjoint(ops, params.w, d_mask, heads.grad_z, bwd);
  const ParamGradients pg = param_gradients(ops, st.z, g, d_mask, x_hat);

  struct Coord {
    double* value;
    double grad;
  };
  std::vector<Coord> coords;
  coords.reserve(total);
  for (std::size_t i = 0; i < params.w.values.size(); ++i)
    coords.push_back({&params.w.values[i], pg.grad_w.values[i]});
  for (std::size_t i = 0; i < params.u.values.size(); ++i)
    coords.push_back({&params.u.values[i], pg.grad_u.values[i]});
  for (std::size_t i = 0; i < params.c.size(); ++i)
    coords.push_back({&params.c[i], pg.grad_c[i]});
  for (std::size_t i = 0; i < params.theta_w.values.size(); ++i)
    coords.push_back({&params.theta_w.values[i], heads.grad_theta_w.values[i]});
  for (std::size_t i = 0; i < params.theta_b.size(); ++i)
    coords.push_back({&params.theta_b[i], heads.grad_theta_b[i]});
  for (std::size_t i = 0; i < params.phi_w.size(); ++i)
    coords.push_back({&params.phi_w[i], heads.grad_phi_w[i]});
  coords.push_back({&params.phi_b, heads.grad_phi_b});

  double worst = 0.0;
  for (const Coord& coord : coords) {
    const double saved = *coord.value;
    *coord.value = saved + epsilon;
    const double f_plus = loss_at(params);
    *coord.value = saved - epsilon;
    const double f_minus = loss_at(params);
    *coord.value = saved;
    const double fd = (f_plus - f_minus) / (2.0 * epsilon);
    const double err =
        std::abs(fd - coord.grad) / std::max({std::abs(fd), std::abs(coord.grad), 1e-3});
    worst = std::max(worst, err);
  }
  return worst;
}

EmbeddingState inference_embeddings(const Dataset& data, const NormalizedOperators& ops,
                                    const ModelParams& params, Activation act,
                                    const SolverConfig& cfg) {
  const DenseMatrix x_hat = stacked_features(data.hypergraph, data.features);
  if (x_hat.cols != params.input_dim())
    throw ValidationError("inference: model expects " + std::to_string(params.input_dim()) +
                          " input features, dataset has " + std::to_string(x_hat.cols));
  const DenseMatrix b = affine_bias(x_hat, params.u, params.c);
  return forward_fixed_point(ops, params.w, b, act, cfg);
}

DenseMatrix inference_logits(const Dataset& data, const NormalizedOperators& ops,
                             const ModelParams& params, Activation act,
                             const SolverConfig& cfg) {
  const EmbeddingState state = inference_embeddings(data, ops, params, act, cfg);
  return classify(data.hypergraph, state.z, params.theta_w, params.theta_b);
}

}  // namespace ihnn
