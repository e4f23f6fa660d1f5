#pragma once

#include <Eigen/Dense>
#include <vector>

#include "s2t/params.hpp"

namespace s2t {

// Adam with bias correction. Moments mirror the registry order and shapes of
// ModelParams::tensors().
struct AdamState {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<Eigen::MatrixXd> m;
  std::vector<Eigen::MatrixXd> v;

  static AdamState init(ModelParams& p, double lr = 0.001);
};

// One Adam update in place. Throws on a non-finite gradient, naming the
// parameter. delta_t is clamped to >= 0 afterward.
void adam_step(ModelParams& params, const GradBundle& grads, AdamState& state);

}  // namespace s2t
