#pragma once

#include <Eigen/Dense>

#include "s2t/params.hpp"

namespace s2t {

// Whole-graph context vector, zero at initialization and mutated across
// batches. `weight` counts the endpoint events folded into z_g so far; the
// trainer keeps z_g as the running mean of the per-event contributions
// (the literal running sum is available behind a flag).
struct GlobalState {
  Eigen::RowVectorXd z_g;
  double weight = 0.0;

  static GlobalState zeros(int dim) {
    return GlobalState{Eigen::RowVectorXd::Zero(dim), 0.0};
  }
};

struct FiLMOutput {
  Eigen::RowVectorXd alpha;    // in (0,1)
  Eigen::RowVectorXd beta;     // in (0,1)
  Eigen::RowVectorXd omega_g;  // (alpha + 1) .* theta_l + beta
};

// z_g += (theta_d * dynamics) * z_x_t. The gate is a scalar broadcast over
// dimensions.
void update_global(GlobalState& g, const Eigen::RowVectorXd& z_x_t,
                   double theta_d, int dynamics);

// z_x_t + (theta_d / dynamics) * z_g.
Eigen::RowVectorXd enhance_node(const Eigen::RowVectorXd& z_x_t,
                                const GlobalState& g, double theta_d,
                                int dynamics);

// alpha = sigmoid((z_x || z_y) * W_alpha + b_alpha), beta likewise; omega_g
// combines them with theta_l.
FiLMOutput film_modulation(const Eigen::RowVectorXd& z_x_t,
                           const Eigen::RowVectorXd& z_y_t,
                           const ModelParams& params);

}  // namespace s2t
