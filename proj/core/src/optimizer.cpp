#include "s2t/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace s2t {

AdamState AdamState::init(ModelParams& p, double lr) {
  AdamState s;
  s.lr = lr;
  for (const auto& t : p.tensors()) {
    s.m.emplace_back(Eigen::MatrixXd::Zero(t.rows, t.cols));
    s.v.emplace_back(Eigen::MatrixXd::Zero(t.rows, t.cols));
  }
  return s;
}

void adam_step(ModelParams& params, const GradBundle& grads, AdamState& state) {
  auto refs = params.tensors();
  if (refs.size() != grads.grads.size() || refs.size() != state.m.size()) {
    throw std::invalid_argument("adam_step: tensor count mismatch");
  }
  for (size_t i = 0; i < refs.size(); ++i) {
    if (!grads.grads[i].allFinite()) {
      throw std::runtime_error("adam_step: non-finite gradient in " + refs[i].name);
    }
    if (grads.grads[i].rows() != refs[i].rows || grads.grads[i].cols() != refs[i].cols) {
      throw std::invalid_argument("adam_step: shape mismatch for " + refs[i].name);
    }
  }
  state.step++;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (size_t i = 0; i < refs.size(); ++i) {
    auto& m = state.m[i];
    auto& v = state.v[i];
    const auto& g = grads.grads[i];
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseProduct(g);
    double* data = refs[i].data;
    const double* md = m.data();
    const double* vd = v.data();
    const long n = refs[i].size();
    for (long k = 0; k < n; ++k) {
      const double mhat = md[k] / bc1;
      const double vhat = vd[k] / bc2;
      data[k] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
  if (params.delta_t < 0.0) params.delta_t = 0.0;
}

}  // namespace s2t
