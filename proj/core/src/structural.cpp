#include "s2t/structural.hpp"

#include <stdexcept>

namespace s2t {

namespace {

Eigen::RowVectorXd apply_act(Eigen::RowVectorXd v, ad::Act act) {
  switch (act) {
    case ad::Act::Sigmoid:
      return v.unaryExpr([](double x) { return ad::sigmoid_scalar(x); });
    case ad::Act::Tanh:
      return v.array().tanh();
    case ad::Act::Relu:
      return v.cwiseMax(0.0);
  }
  return v;
}

}  // namespace

std::vector<double> interval_weights(
    const std::vector<NeighborSequence::Entry>& view, double t_c) {
  if (view.empty()) {
    throw std::invalid_argument("interval_weights: empty sequence");
  }
  std::vector<double> w;
  w.reserve(view.size());
  double total = 0.0;
  for (const auto& e : view) {
    if (e.time > t_c) {
      throw std::invalid_argument("interval_weights: future neighbor");
    }
    w.push_back(t_c - e.time);
    total += t_c - e.time;
  }
  if (total == 0.0) {
    const double u = 1.0 / static_cast<double>(view.size());
    for (double& x : w) x = u;
  } else {
    for (double& x : w) x /= total;
  }
  return w;
}

Eigen::RowVectorXd gnn_layer(const Eigen::RowVectorXd& z_self_prev,
                             const std::vector<Eigen::RowVectorXd>& neighbor_prevs,
                             const std::vector<double>& w,
                             const Eigen::MatrixXd& w_self,
                             const Eigen::MatrixXd& w_nbr, ad::Act act) {
  if (neighbor_prevs.size() != w.size()) {
    throw std::invalid_argument("gnn_layer: weights/neighbors mismatch");
  }
  if (z_self_prev.cols() != w_self.rows()) {
    throw std::invalid_argument("gnn_layer: shape mismatch");
  }
  Eigen::RowVectorXd pre = z_self_prev * w_self;
  for (size_t i = 0; i < neighbor_prevs.size(); ++i) {
    if (neighbor_prevs[i].cols() != w_nbr.rows()) {
      throw std::invalid_argument("gnn_layer: neighbor shape mismatch");
    }
    pre += (neighbor_prevs[i] * w_nbr) * w[i];
  }
  return apply_act(std::move(pre), act);
}

Eigen::RowVectorXd node_representation(NodeId node, double t, int depth,
                                       const SequenceStore& store,
                                       const ModelParams& params, ad::Act act,
                                       ReprMemo* memo) {
  if (depth < 0 || depth > params.layers) {
    throw std::invalid_argument("node_representation: bad depth");
  }
  if (depth == 0) {
    return base_embedding(params, node);
  }
  if (memo) {
    auto it = memo->find({node, depth, t});
    if (it != memo->end()) return it->second;
  }
  const Eigen::RowVectorXd self_prev =
      node_representation(node, t, depth - 1, store, params, act, memo);
  const auto view = store.neighbors_at(node).view(t);
  std::vector<Eigen::RowVectorXd> nbr_prevs;
  std::vector<double> w;
  if (!view.empty()) {
    w = interval_weights(view, t);
    nbr_prevs.reserve(view.size());
    for (const auto& e : view) {
      nbr_prevs.push_back(
          node_representation(e.neighbor, e.time, depth - 1, store, params, act, memo));
    }
  }
  Eigen::RowVectorXd out =
      gnn_layer(self_prev, nbr_prevs, w, params.w_self[static_cast<size_t>(depth - 1)],
                params.w_nbr[static_cast<size_t>(depth - 1)], act);
  if (memo) (*memo)[{node, depth, t}] = out;
  return out;
}

IntensityVector local_intensity(const Eigen::RowVectorXd& z_x_t,
                                const Eigen::RowVectorXd& z_y_t,
                                const Eigen::RowVectorXd& omega_g) {
  if (z_x_t.cols() != z_y_t.cols() || z_x_t.cols() != omega_g.cols()) {
    throw std::invalid_argument("local_intensity: dimension mismatch");
  }
  IntensityVector out;
  out.vec = (-(z_x_t - z_y_t).array().square() * omega_g.array()).matrix();
  out.scalar = out.vec.sum();
  return out;
}

}  // namespace s2t
