#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace s2t {

// Flat view into one learnable tensor (scalars are 1x1). Storage is
// column-major Eigen data; `data` stays valid while the owning ModelParams
// lives and is not resized.
struct TensorRef {
  std::string name;
  double* data = nullptr;
  long rows = 0;
  long cols = 0;
  long size() const { return rows * cols; }
};

// Every learnable tensor of the model plus the fixed loss weights.
struct ModelParams {
  int num_nodes = 0;
  int feat_dim = 0;  // 0 when nodes carry no features
  int dim = 0;
  int layers = 0;

  // Either a linear map of node features (feat_dim x d) or, when no
  // features exist, a free per-node embedding table (num_nodes x d).
  Eigen::MatrixXd w0;
  std::optional<Eigen::MatrixXd> features;  // num_nodes x feat_dim, constant

  std::vector<Eigen::MatrixXd> w_self;  // layers x (d x d)
  std::vector<Eigen::MatrixXd> w_nbr;   // layers x (d x d)

  double delta_t = 1.0;  // Hawkes time-decay rate, clamped >= 0
  double theta_d = 0.1;  // global update rate

  Eigen::RowVectorXd theta_l;  // base global parameter, d

  Eigen::MatrixXd w_alpha, w_beta;     // 2d x d
  Eigen::RowVectorXd b_alpha, b_beta;  // d

  // Loss weights. Fixed scalars by default; when learn_etas is set the
  // effective weights are softplus(rho1), softplus(rho2).
  bool learn_etas = false;
  double eta1 = 1.0, eta2 = 1.0;
  double rho1 = 0.0, rho2 = 0.0;

  double eta1_effective() const;
  double eta2_effective() const;

  // Registry over all learnable tensors, in a fixed order.
  std::vector<TensorRef> tensors();

  bool all_finite() const;
};

// Glorot-uniform matrices, delta_t = 1, theta_d = 0.1, theta_l = ones, FiLM
// biases zero. Deterministic under `seed`. Pass feat_dim = 0 for the free
// embedding table fallback.
ModelParams init_params(int num_nodes, int feat_dim, int dim, int layers,
                        std::uint64_t seed, bool learn_etas = false);

// Layer-0 input and the Hawkes-side representation of one node.
Eigen::RowVectorXd base_embedding(const ModelParams& p, int node);

// Gradient tensors shaped after ModelParams::tensors().
struct GradBundle {
  std::vector<Eigen::MatrixXd> grads;
  std::vector<std::string> names;

  static GradBundle zeros_like(ModelParams& p);
  void set_zero();
  Eigen::MatrixXd& by_name(const std::string& name);
};

}  // namespace s2t
