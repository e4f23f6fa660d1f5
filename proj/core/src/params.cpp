#include "s2t/params.hpp"

#include <cmath>
#include <stdexcept>

#include "s2t/ad.hpp"
#include "s2t/rng.hpp"

namespace s2t {

namespace {

Eigen::MatrixXd glorot(long rows, long cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Eigen::MatrixXd m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      m(r, c) = rng.uniform(-bound, bound);
    }
  }
  return m;
}

}  // namespace

double ModelParams::eta1_effective() const {
  return learn_etas ? ad::softplus_scalar(rho1) : eta1;
}

double ModelParams::eta2_effective() const {
  return learn_etas ? ad::softplus_scalar(rho2) : eta2;
}

std::vector<TensorRef> ModelParams::tensors() {
  std::vector<TensorRef> out;
  out.push_back({features ? "W0" : "embed", w0.data(), w0.rows(), w0.cols()});
  for (int l = 0; l < layers; ++l) {
    out.push_back({"W_S^" + std::to_string(l + 1), w_self[static_cast<size_t>(l)].data(),
                   w_self[static_cast<size_t>(l)].rows(), w_self[static_cast<size_t>(l)].cols()});
    out.push_back({"W_N^" + std::to_string(l + 1), w_nbr[static_cast<size_t>(l)].data(),
                   w_nbr[static_cast<size_t>(l)].rows(), w_nbr[static_cast<size_t>(l)].cols()});
  }
  out.push_back({"delta_t", &delta_t, 1, 1});
  out.push_back({"theta_d", &theta_d, 1, 1});
  out.push_back({"theta_l", theta_l.data(), 1, theta_l.cols()});
  out.push_back({"W_alpha", w_alpha.data(), w_alpha.rows(), w_alpha.cols()});
  out.push_back({"b_alpha", b_alpha.data(), 1, b_alpha.cols()});
  out.push_back({"W_beta", w_beta.data(), w_beta.rows(), w_beta.cols()});
  out.push_back({"b_beta", b_beta.data(), 1, b_beta.cols()});
  if (learn_etas) {
    out.push_back({"rho1", &rho1, 1, 1});
    out.push_back({"rho2", &rho2, 1, 1});
  }
  return out;
}

bool ModelParams::all_finite() const {
  auto ok = [](const Eigen::MatrixXd& m) { return m.allFinite(); };
  if (!ok(w0)) return false;
  for (const auto& w : w_self)
    if (!ok(w)) return false;
  for (const auto& w : w_nbr)
    if (!ok(w)) return false;
  if (!std::isfinite(delta_t) || !std::isfinite(theta_d)) return false;
  if (!theta_l.allFinite()) return false;
  if (!ok(w_alpha) || !ok(w_beta)) return false;
  if (!b_alpha.allFinite() || !b_beta.allFinite()) return false;
  if (!std::isfinite(rho1) || !std::isfinite(rho2)) return false;
  return true;
}

ModelParams init_params(int num_nodes, int feat_dim, int dim, int layers,
                        std::uint64_t seed, bool learn_etas) {
  if (dim < 1 || layers < 1) {
    throw std::invalid_argument("init_params: dim and layers must be >= 1");
  }
  if (num_nodes < 1) {
    throw std::invalid_argument("init_params: num_nodes must be >= 1");
  }
  Rng rng(seed);
  ModelParams p;
  p.num_nodes = num_nodes;
  p.feat_dim = feat_dim;
  p.dim = dim;
  p.layers = layers;
  if (feat_dim > 0) {
    p.w0 = glorot(feat_dim, dim, rng);
  } else {
    p.w0 = glorot(num_nodes, dim, rng);
  }
  for (int l = 0; l < layers; ++l) {
    p.w_self.push_back(glorot(dim, dim, rng));
    p.w_nbr.push_back(glorot(dim, dim, rng));
  }
  p.delta_t = 1.0;
  p.theta_d = 0.1;
  p.theta_l = Eigen::RowVectorXd::Ones(dim);
  p.w_alpha = glorot(2 * dim, dim, rng);
  p.w_beta = glorot(2 * dim, dim, rng);
  p.b_alpha = Eigen::RowVectorXd::Zero(dim);
  p.b_beta = Eigen::RowVectorXd::Zero(dim);
  p.learn_etas = learn_etas;
  if (learn_etas) {
    // softplus(rho) == 1
    const double inv = std::log(std::exp(1.0) - 1.0);
    p.rho1 = inv;
    p.rho2 = inv;
  }
  return p;
}

Eigen::RowVectorXd base_embedding(const ModelParams& p, int node) {
  if (node < 0 || node >= p.num_nodes) {
    throw std::out_of_range("base_embedding: unknown node " + std::to_string(node));
  }
  if (p.features) {
    return p.features->row(node) * p.w0;
  }
  return p.w0.row(node);
}

GradBundle GradBundle::zeros_like(ModelParams& p) {
  GradBundle b;
  for (const auto& t : p.tensors()) {
    b.grads.emplace_back(Eigen::MatrixXd::Zero(t.rows, t.cols));
    b.names.push_back(t.name);
  }
  return b;
}

void GradBundle::set_zero() {
  for (auto& g : grads) g.setZero();
}

Eigen::MatrixXd& GradBundle::by_name(const std::string& name) {
  for (size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return grads[i];
  }
  throw std::out_of_range("GradBundle: no tensor named " + name);
}

}  // namespace s2t
