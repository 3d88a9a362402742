#include "ihnn/model.hpp"

#include <cmath>
#include <string>

#include "ihnn/errors.hpp"

namespace ihnn {

void ModelParams::validate() const {
  const std::size_t d = w.rows;
  if (w.cols != d) throw ValidationError("ModelParams: W must be square");
  if (u.cols != d) throw ValidationError("ModelParams: U must have d columns");
  if (c.size() != d) throw ValidationError("ModelParams: c must have length d");
  if (theta_w.rows != 2 * d)
    throw ValidationError("ModelParams: theta weight must have 2d rows");
  if (theta_b.size() != theta_w.cols)
    throw ValidationError("ModelParams: theta bias length must match class count");
  if (phi_w.size() != 2 * d)
    throw ValidationError("ModelParams: phi weight must have length 2d");
  w.check_finite("ModelParams: W");
  u.check_finite("ModelParams: U");
  theta_w.check_finite("ModelParams: theta");
  for (double x : c)
    if (!std::isfinite(x)) throw ValidationError("ModelParams: c has a non-finite entry");
  for (double x : theta_b)
    if (!std::isfinite(x)) throw ValidationError("ModelParams: theta bias has a non-finite entry");
  for (double x : phi_w)
    if (!std::isfinite(x)) throw ValidationError("ModelParams: phi has a non-finite entry");
  if (!std::isfinite(phi_b)) throw ValidationError("ModelParams: phi bias is non-finite");
}

DenseMatrix affine_bias(const DenseMatrix& x_hat, const DenseMatrix& u,
                        const std::vector<double>& c) {
  if (c.size() != u.cols)
    throw ValidationError("affine_bias: c length " + std::to_string(c.size()) +
                          " does not match U columns " + std::to_string(u.cols));
  DenseMatrix b = matmul(x_hat, u);
  for (std::size_t i = 0; i < b.rows; ++i) {
    double* row = b.row_data(i);
    for (std::size_t j = 0; j < b.cols; ++j) row[j] += c[j];
  }
  return b;
}

DenseMatrix build_edge_features(const Hypergraph& hg, const DenseMatrix& x_v) {
  if (x_v.rows != hg.node_count)
    throw ValidationError("build_edge_features: feature rows " + std::to_string(x_v.rows) +
                          " do not match node count " + std::to_string(hg.node_count));
  DenseMatrix x_e(hg.edge_count(), x_v.cols);
  for (std::size_t e = 0; e < hg.edge_count(); ++e) {
    const auto& edge = hg.hyperedges[e];
    double* out = x_e.row_data(e);
    for (std::size_t v : edge) {
      const double* row = x_v.row_data(v);
      for (std::size_t j = 0; j < x_v.cols; ++j) out[j] += row[j];
    }
    const double inv = 1.0 / static_cast<double>(edge.size());
    for (std::size_t j = 0; j < x_v.cols; ++j) out[j] *= inv;
  }
  return x_e;
}

DenseMatrix stacked_features(const Hypergraph& hg, const DenseMatrix& x_v) {
  const DenseMatrix x_e = build_edge_features(hg, x_v);
  DenseMatrix x_hat(hg.node_count + hg.edge_count(), x_v.cols);
  std::copy(x_v.values.begin(), x_v.values.end(), x_hat.values.begin());
  std::copy(x_e.values.begin(), x_e.values.end(),
            x_hat.values.begin() + static_cast<std::ptrdiff_t>(x_v.values.size()));
  return x_hat;
}

DenseMatrix node_context(const Hypergraph& hg, const DenseMatrix& z) {
  const std::size_t n = hg.node_count;
  const std::size_t d = z.cols;
  if (z.rows != n + hg.edge_count())
    throw ValidationError("node_context: embedding rows " + std::to_string(z.rows) +
                          " do not match n + E = " + std::to_string(n + hg.edge_count()));
  DenseMatrix h(n, 2 * d);
  for (std::size_t v = 0; v < n; ++v) {
    double* out = h.row_data(v);
    const double* zv = z.row_data(v);
    for (std::size_t j = 0; j < d; ++j) out[j] = zv[j];
    const auto& incident = hg.node_to_edges[v];
    if (incident.empty()) continue;
    for (std::size_t e : incident) {
      const double* ze = z.row_data(n + e);
      for (std::size_t j = 0; j < d; ++j) out[d + j] += ze[j];
    }
    const double inv = 1.0 / static_cast<double>(incident.size());
    for (std::size_t j = 0; j < d; ++j) out[d + j] *= inv;
  }
  return h;
}

DenseMatrix classify(const Hypergraph& hg, const DenseMatrix& z,
                     const DenseMatrix& theta_w, const std::vector<double>& theta_b) {
  if (theta_w.rows != 2 * z.cols)
    throw ValidationError("classify: theta weight rows must equal 2d");
  if (theta_b.size() != theta_w.cols)
    throw ValidationError("classify: theta bias length must equal class count");
  DenseMatrix logits = matmul(node_context(hg, z), theta_w);
  for (std::size_t v = 0; v < logits.rows; ++v) {
    double* row = logits.row_data(v);
    for (std::size_t j = 0; j < logits.cols; ++j) row[j] += theta_b[j];
  }
  return logits;
}

LogitsLoss classification_loss(const DenseMatrix& logits,
                               const std::vector<std::size_t>& labels,
                               const std::vector<std::uint8_t>& mask) {
  if (labels.size() != logits.rows || mask.size() != logits.rows)
    throw ValidationError("classification_loss: labels and mask must have one entry per row");
  std::size_t count = 0;
  for (std::uint8_t m : mask) count += m ? 1 : 0;
  if (count == 0) throw ValidationError("classification_loss: mask selects no rows");

  const std::size_t classes = logits.cols;
  const double inv = 1.0 / static_cast<double>(count);
  LogitsLoss out;
  out.grad = DenseMatrix(logits.rows, classes);
  for (std::size_t v = 0; v < logits.rows; ++v) {
    if (!mask[v]) continue;
    if (labels[v] >= classes)
      throw ValidationError("classification_loss: label " + std::to_string(labels[v]) +
                            " at row " + std::to_string(v) + " exceeds class count " +
                            std::to_string(classes));
    const double* row = logits.row_data(v);
    double peak = row[0];
    for (std::size_t j = 1; j < classes; ++j) peak = std::max(peak, row[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < classes; ++j) sum += std::exp(row[j] - peak);
    out.loss += (std::log(sum) + peak - row[labels[v]]) * inv;
    double* grad = out.grad.row_data(v);
    for (std::size_t j = 0; j < classes; ++j) {
      const double p = std::exp(row[j] - peak) / sum;
      grad[j] = (p - (j == labels[v] ? 1.0 : 0.0)) * inv;
    }
  }
  return out;
}

MembershipBatch sample_membership(const Hypergraph& hg, std::size_t batch_size, Rng& rng) {
  if (batch_size == 0) throw ValidationError("sample_membership: batch_size must be >= 1");
  if (hg.edge_count() == 0) throw ValidationError("sample_membership: hypergraph has no hyperedges");

  MembershipBatch batch;
  batch.pairs.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    const std::size_t e = rng.uniform_int(hg.edge_count());
    const auto& edge = hg.hyperedges[e];
    const bool want_member = rng.uniform() < 0.5;
    if (want_member || edge.size() == hg.node_count) {
      batch.pairs.push_back({e, edge[rng.uniform_int(edge.size())], 1});
      continue;
    }
    // Rank within the complement of the sorted member list maps to a node id.
    std::size_t candidate = rng.uniform_int(hg.node_count - edge.size());
    for (std::size_t member : edge) {
      if (member <= candidate) ++candidate;
      else break;
    }
    batch.pairs.push_back({e, candidate, 0});
  }
  return batch;
}

MembershipLoss membership_loss(const DenseMatrix& z, std::size_t node_count,
                               const MembershipBatch& batch,
                               const std::vector<double>& phi_w, double phi_b) {
  if (batch.pairs.empty()) throw ValidationError("membership_loss: empty batch");
  const std::size_t d = z.cols;
  if (phi_w.size() != 2 * d)
    throw ValidationError("membership_loss: phi weight must have length 2d");
  if (z.rows < node_count)
    throw ValidationError("membership_loss: embedding has fewer rows than nodes");

  const std::size_t edge_rows = z.rows - node_count;
  const double inv = 1.0 / static_cast<double>(batch.pairs.size());
  MembershipLoss out;
  out.grad_z = DenseMatrix(z.rows, d);
  out.grad_phi_w.assign(2 * d, 0.0);

  for (const MembershipPair& pair : batch.pairs) {
    if (pair.edge >= edge_rows || pair.node >= node_count)
      throw ValidationError("membership_loss: pair indices out of range");
    const double* ze = z.row_data(node_count + pair.edge);
    const double* zv = z.row_data(pair.node);
    double logit = phi_b;
    for (std::size_t j = 0; j < d; ++j) logit += phi_w[j] * ze[j] + phi_w[d + j] * zv[j];

    const double y = pair.label ? 1.0 : 0.0;
    out.loss += (std::max(logit, 0.0) - y * logit + std::log1p(std::exp(-std::abs(logit)))) * inv;
    const double p = logit >= 0.0 ? 1.0 / (1.0 + std::exp(-logit))
                                  : std::exp(logit) / (1.0 + std::exp(logit));
    const double dlogit = (p - y) * inv;

    double* ge = out.grad_z.row_data(node_count + pair.edge);
    double* gv = out.grad_z.row_data(pair.node);
    for (std::size_t j = 0; j < d; ++j) {
      ge[j] += dlogit * phi_w[j];
      gv[j] += dlogit * phi_w[d + j];
      out.grad_phi_w[j] += dlogit * ze[j];
      out.grad_phi_w[d + j] += dlogit * zv[j];
    }
    out.grad_phi_b += dlogit;
  }
  return out;
}

HeadGradients head_gradients(const Hypergraph& hg, const DenseMatrix& z,
                             const std::vector<std::size_t>& labels,
                             const std::vector<std::uint8_t>& train_mask,
                             const MembershipBatch& batch, const ModelParams& params,
                             double gamma) {
  const std::size_t n = hg.node_count;
  const std::size_t d = z.cols;

  const DenseMatrix h = node_context(hg, z);
  DenseMatrix logits = matmul(h, params.theta_w);
  for (std::size_t v = 0; v < n; ++v) {
    double* row = logits.row_data(v);
    for (std::size_t j = 0; j < logits.cols; ++j) row[j] += params.theta_b[j];
  }
  const LogitsLoss cls = classification_loss(logits, labels, train_mask);

  HeadGradients out;
  out.loss_cls = cls.loss;
  out.logits = std::move(logits);
  out.grad_z = DenseMatrix(z.rows, d);
  out.grad_theta_w = matmul_at_b(h, cls.grad);
  out.grad_theta_b = column_sums(cls.grad);
  out.grad_phi_w.assign(2 * d, 0.0);

  const DenseMatrix grad_h = matmul_a_bt(cls.grad, params.theta_w);
  for (std::size_t v = 0; v < n; ++v) {
    if (!train_mask[v]) continue;
    const double* gh = grad_h.row_data(v);
    double* gz = out.grad_z.row_data(v);
    for (std::size_t j = 0; j < d; ++j) gz[j] += gh[j];
    const auto& incident = hg.node_to_edges[v];
    if (incident.empty()) continue;
    const double inv = 1.0 / static_cast<double>(incident.size());
    for (std::size_t e : incident) {
      double* ge = out.grad_z.row_data(n + e);
      for (std::size_t j = 0; j < d; ++j) ge[j] += gh[d + j] * inv;
    }
  }

  const MembershipLoss memb = membership_loss(z, n, batch, params.phi_w, params.phi_b);
  out.loss_memb = memb.loss;
  if (gamma != 0.0) {
    axpy_inplace(out.grad_z, gamma, memb.grad_z);
    for (std::size_t j = 0; j < 2 * d; ++j) out.grad_phi_w[j] = gamma * memb.grad_phi_w[j];
    out.grad_phi_b = gamma * memb.grad_phi_b;
  }
  return out;
}

}  // namespace ihnn
