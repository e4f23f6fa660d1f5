#include "s2t/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace s2t {

IntensityVector base_intensity(const Eigen::RowVectorXd& z_x,
                               const Eigen::RowVectorXd& z_y) {
  if (z_x.cols() != z_y.cols()) {
    throw std::invalid_argument("base_intensity: dimension mismatch");
  }
  IntensityVector out;
  out.vec = -(z_x - z_y).array().square();
  out.scalar = out.vec.sum();
  return out;
}

double time_decay(double t_c, double t_i, double delta_t) {
  if (t_c < t_i) {
    throw std::invalid_argument("time_decay: future neighbor (t_c < t_i)");
  }
  return std::exp(-delta_t * (t_c - t_i));
}

std::vector<double> neighbor_similarity_weights(
    const std::vector<NeighborSequence::Entry>& view,
    const Eigen::RowVectorXd& z_owner, const ModelParams& params) {
  if (view.empty()) {
    throw std::invalid_argument("neighbor_similarity_weights: empty sequence");
  }
  std::vector<double> logits;
  logits.reserve(view.size());
  for (const auto& e : view) {
    logits.push_back(base_intensity(base_embedding(params, e.neighbor), z_owner).scalar);
  }
  const double m = *std::max_element(logits.begin(), logits.end());
  double denom = 0.0;
  for (double& l : logits) {
    l = std::exp(l - m);
    denom += l;
  }
  for (double& l : logits) l /= denom;
  return logits;
}

IntensityVector temporal_intensity(NodeId x, NodeId y, double t,
                                   const SequenceStore& store,
                                   const ModelParams& params) {
  const Eigen::RowVectorXd z_x = base_embedding(params, x);
  const Eigen::RowVectorXd z_y = base_embedding(params, y);
  IntensityVector out = base_intensity(z_x, z_y);

  // One Hawkes side: sum over the owner's neighbors i of
  // s_(i,owner) * f(t - t_i) * mu_(i, other).
  auto side = [&](NodeId owner, const Eigen::RowVectorXd& z_owner,
                  const Eigen::RowVectorXd& z_other) {
    const auto view = store.neighbors_at(owner).view(t);
    if (view.empty()) return;
    const auto s = neighbor_similarity_weights(view, z_owner, params);
    for (size_t i = 0; i < view.size(); ++i) {
      const double a = s[i] * time_decay(t, view[i].time, params.delta_t);
      out.vec += a * base_intensity(base_embedding(params, view[i].neighbor), z_other).vec;
    }
  };
  side(x, z_x, z_y);
  side(y, z_y, z_x);
  out.scalar = out.vec.sum();
  return out;
}

}  // namespace s2t
