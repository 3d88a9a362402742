#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ihnn/dataset.hpp"
#include "ihnn/equilibrium.hpp"
#include "ihnn/model.hpp"

namespace ihnn {

struct TrainConfig {
  std::size_t epochs = 100;
  double learning_rate = 0.01;
  double momentum = 0.0;
  double gamma = 0.1;        // membership loss weight
  double kappa = 0.95;       // contraction budget, inf_norm(W) * opnorm(A) <= kappa
  SolverConfig forward = {1e-6, 300};
  SolverConfig backward = {1e-8, 300};
  std::size_t batch_size = 256;
  std::uint64_t seed = 1;
  Activation activation = Activation::relu;
  std::size_t embed_dim = 128;
  double val_fraction = 0.1;  // share of training nodes held out for reporting
  double train_ratio = 0.3;   // used when loading datasets without stored masks

  void validate() const;
};

struct EpochRecord {
  double loss_total = 0.0;
  double loss_cls = 0.0;
  double loss_memb = 0.0;
  double train_acc = 0.0;
  double val_acc = 0.0;       // NaN when no validation nodes are held out
  std::size_t forward_iters = 0;
  std::size_t backward_iters = 0;
  double wall_seconds = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  ModelParams final_params;
};

// W uniform in [-radius/d, radius/d] per entry and then row-projected onto
// the l1 ball of kappa_radius; U and the heads small uniform; biases zero.
ModelParams init_params(std::size_t d_in, std::size_t d, std::size_t classes,
                        double kappa_radius, std::uint64_t seed);

// Fraction of masked nodes whose argmax logit matches the label; NaN when the
// mask is empty.
double masked_accuracy(const DenseMatrix& logits, const std::vector<std::size_t>& labels,
                       const std::vector<std::uint8_t>& mask);

// Runs full-graph projected gradient descent: equilibrium solve, both heads,
// adjoint solve, parameter gradients, optimizer step, then the row-wise l1
// projection of W. The dataset and operators must outlive the trainer.
class Trainer {
 public:
  Trainer(const Dataset& data, const NormalizedOperators& ops, const TrainConfig& cfg);

  EpochRecord train_epoch();
  TrainReport train();  // cfg.epochs passes

  const ModelParams& params() const { return params_; }
  ModelParams& params() { return params_; }
  const DenseMatrix& input_features() const { return x_hat_; }
  const std::vector<std::uint8_t>& core_train_mask() const { return train_core_; }
  const std::vector<std::uint8_t>& validation_mask() const { return val_mask_; }

 private:
  const Dataset& data_;
  const NormalizedOperators& ops_;
  TrainConfig cfg_;
  ModelParams params_;
  DenseMatrix x_hat_;
  std::vector<std::uint8_t> train_core_;
  std::vector<std::uint8_t> val_mask_;
  Rng sampler_rng_;
  std::size_t epoch_index_ = 0;

  DenseMatrix vel_w_, vel_u_, vel_theta_w_;
  std::vector<double> vel_c_, vel_theta_b_, vel_phi_w_;
  double vel_phi_b_ = 0.0;
};

// Central finite differences over every scalar parameter against the
// implicit gradients, on solver tolerances tightened to 1e-12. Returns the
// worst error |fd - grad| / max(|fd|, |grad|, 1e-3), so 1e-5 on the return
// value bounds the absolute error by 1e-8 wherever both values are small.
double gradient_check(const Dataset& data, const NormalizedOperators& ops,
                      const TrainConfig& cfg, double epsilon = 1e-5);

// Deterministic inference at fixed parameters.
EmbeddingState inference_embeddings(const Dataset& data, const NormalizedOperators& ops,
                                    const ModelParams& params, Activation act,
                                    const SolverConfig& cfg = {});

DenseMatrix inference_logits(const Dataset& data, const NormalizedOperators& ops,
                             const ModelParams& params, Activation act,
                             const SolverConfig& cfg = {});

}  // namespace ihnn
