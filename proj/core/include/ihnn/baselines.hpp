#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ihnn/dataset.hpp"
#include "ihnn/dense.hpp"
#include "ihnn/equilibrium.hpp"
#include "ihnn/sparse.hpp"

namespace ihnn {

// Explicit k-layer network: z <- act(L z W_i) with L = l_ve * l_ve^T, then a
// linear head on the final node embeddings.
struct HgnnModel {
  std::vector<DenseMatrix> weights;  // weights[0] d_in x d, the rest d x d
  DenseMatrix head_w;                // d x C
  std::vector<double> head_b;        // C
  Activation activation = Activation::relu;

  std::size_t layer_count() const { return weights.size(); }
};

HgnnModel init_hgnn(std::size_t d_in, std::size_t hidden, std::size_t classes,
                    std::size_t layers, Activation act, std::uint64_t seed);

struct HgnnCache {
  std::vector<DenseMatrix> z;    // z[0] = X, z[i] = layer-i output; size layers+1
  std::vector<DenseMatrix> lz;   // lz[i] = L z[i], the layer-(i+1) input product
  std::vector<DenseMatrix> pre;  // pre[i] = lz[i] * weights[i]
  DenseMatrix logits;
};

// l_ev must be l_ve.transposed(); L z is evaluated as l_ve * (l_ev * z).
HgnnCache hgnn_forward(const SparseMatrix& l_ve, const SparseMatrix& l_ev,
                       const DenseMatrix& x, const HgnnModel& model);

struct HgnnGradients {
  std::vector<DenseMatrix> weights;
  DenseMatrix head_w;
  std::vector<double> head_b;
};

HgnnGradients hgnn_backprop(const SparseMatrix& l_ve, const SparseMatrix& l_ev,
                            const HgnnModel& model, const HgnnCache& cache,
                            const DenseMatrix& grad_logits);

// One hidden ReLU layer on the raw features; no hypergraph structure.
struct MlpModel {
  DenseMatrix w1;              // d_in x hidden
  std::vector<double> b1;
  DenseMatrix w2;              // hidden x C
  std::vector<double> b2;
  Activation activation = Activation::relu;
};

MlpModel init_mlp(std::size_t d_in, std::size_t hidden, std::size_t classes,
                  Activation act, std::uint64_t seed);

struct MlpCache {
  DenseMatrix pre;     // X w1 + b1
  DenseMatrix hidden;  // act(pre)
  DenseMatrix logits;
};

MlpCache mlp_forward(const DenseMatrix& x, const MlpModel& model);

struct MlpGradients {
  DenseMatrix w1;
  std::vector<double> b1;
  DenseMatrix w2;
  std::vector<double> b2;
};

MlpGradients mlp_backprop(const DenseMatrix& x, const MlpModel& model,
                          const MlpCache& cache, const DenseMatrix& grad_logits);

struct BaselineConfig {
  std::size_t epochs = 100;
  double learning_rate = 0.01;
  double momentum = 0.0;
  std::size_t hidden_dim = 16;
  std::size_t layers = 2;  // HGNN depth; ignored by the MLP
  Activation activation = Activation::relu;
  std::uint64_t seed = 1;

  void validate() const;
};

// Full-graph gradient descent on the masked cross-entropy. The optional
// loss_curve receives one training-loss value per epoch.
HgnnModel train_hgnn(const Dataset& data, const BaselineConfig& cfg,
                     std::vector<double>* loss_curve = nullptr);
MlpModel train_mlp(const Dataset& data, const BaselineConfig& cfg,
                   std::vector<double>* loss_curve = nullptr);

// Accuracy over the test mask.
double evaluate_hgnn(const Dataset& data, const HgnnModel& model);
double evaluate_mlp(const Dataset& data, const MlpModel& model);

}  // namespace ihnn
