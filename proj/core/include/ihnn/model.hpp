#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ihnn/dense.hpp"
#include "ihnn/hypergraph.hpp"
#include "ihnn/rng.hpp"

namespace ihnn {

struct ModelParams {
  DenseMatrix w;                 // d x d equilibrium weight
  DenseMatrix u;                 // d_in x d input map
  std::vector<double> c;         // length d, bias of the input map
  DenseMatrix theta_w;           // 2d x C classifier weight
  std::vector<double> theta_b;   // length C
  std::vector<double> phi_w;     // length 2d, membership head weight
  double phi_b = 0.0;

  std::size_t embed_dim() const { return w.rows; }
  std::size_t input_dim() const { return u.rows; }
  std::size_t class_count() const { return theta_b.size(); }

  void validate() const;
};

// B = X U + 1 c^T, rows of X covering nodes then hyperedges.
DenseMatrix affine_bias(const DenseMatrix& x_hat, const DenseMatrix& u,
                        const std::vector<double>& c);

// Row e = mean of the member nodes' feature rows.
DenseMatrix build_edge_features(const Hypergraph& hg, const DenseMatrix& x_v);

// [X_v; build_edge_features], shape (n+E) x d_in.
DenseMatrix stacked_features(const Hypergraph& hg, const DenseMatrix& x_v);

// Per-node context h_v = concat(z_v, mean of incident hyperedge rows of z),
// zero pooled part for isolated nodes. Shape n x 2d.
DenseMatrix node_context(const Hypergraph& hg, const DenseMatrix& z);

// Linear classifier on the node context. Shape n x C.
DenseMatrix classify(const Hypergraph& hg, const DenseMatrix& z,
                     const DenseMatrix& theta_w, const std::vector<double>& theta_b);

struct LogitsLoss {
  double loss = 0.0;
  DenseMatrix grad;  // d(loss)/d(logits); zero rows outside the mask
};

// Mean softmax cross-entropy over the masked rows.
LogitsLoss classification_loss(const DenseMatrix& logits,
                               const std::vector<std::size_t>& labels,
                               const std::vector<std::uint8_t>& mask);

struct MembershipPair {
  std::size_t edge = 0;
  std::size_t node = 0;
  int label = 0;  // 1 when the node belongs to the hyperedge
};

struct MembershipBatch {
  std::vector<MembershipPair> pairs;
};

// Uniform hyperedges with replacement; per edge a fair coin picks a uniform
// member (label 1) or a uniform non-member (label 0). A hyperedge covering
// every node always yields a member pair.
MembershipBatch sample_membership(const Hypergraph& hg, std::size_t batch_size, Rng& rng);

struct MembershipLoss {
  double loss = 0.0;
  DenseMatrix grad_z;              // (n+E) x d, scattered pair contributions
  std::vector<double> grad_phi_w;  // length 2d
  double grad_phi_b = 0.0;
};

// Mean binary cross-entropy of the logistic head on concat(z_edge, z_node).
MembershipLoss membership_loss(const DenseMatrix& z, std::size_t node_count,
                               const MembershipBatch& batch,
                               const std::vector<double>& phi_w, double phi_b);

struct HeadGradients {
  double loss_cls = 0.0;
  double loss_memb = 0.0;
  DenseMatrix logits;              // n x C, classifier output at z
  DenseMatrix grad_z;              // d(loss_cls + gamma * loss_memb)/dz
  DenseMatrix grad_theta_w;
  std::vector<double> grad_theta_b;
  std::vector<double> grad_phi_w;
  double grad_phi_b = 0.0;
};

// Evaluates both heads at a fixed z and assembles their losses and exact
// gradients, with the membership terms scaled by gamma.
HeadGradients head_gradients(const Hypergraph& hg, const DenseMatrix& z,
                             const std::vector<std::size_t>& labels,
                             const std::vector<std::uint8_t>& train_mask,
                             const MembershipBatch& batch, const ModelParams& params,
                             double gamma);

}  // namespace ihnn
