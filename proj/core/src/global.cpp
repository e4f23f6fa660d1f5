#include "s2t/global.hpp"

#include <stdexcept>

#include "s2t/ad.hpp"

namespace s2t {

void update_global(GlobalState& g, const Eigen::RowVectorXd& z_x_t,
                   double theta_d, int dynamics) {
  if (dynamics < 1) throw std::invalid_argument("update_global: dynamics < 1");
  if (!z_x_t.allFinite()) {
    throw std::invalid_argument("update_global: non-finite input");
  }
  g.z_g += (theta_d * static_cast<double>(dynamics)) * z_x_t;
}

Eigen::RowVectorXd enhance_node(const Eigen::RowVectorXd& z_x_t,
                                const GlobalState& g, double theta_d,
                                int dynamics) {
  if (dynamics < 1) throw std::invalid_argument("enhance_node: dynamics < 1");
  return z_x_t + (theta_d / static_cast<double>(dynamics)) * g.z_g;
}

FiLMOutput film_modulation(const Eigen::RowVectorXd& z_x_t,
                           const Eigen::RowVectorXd& z_y_t,
                           const ModelParams& params) {
  if (z_x_t.cols() != z_y_t.cols()) {
    throw std::invalid_argument("film_modulation: dimension mismatch");
  }
  const long d = z_x_t.cols();
  if (params.w_alpha.rows() != 2 * d || params.w_alpha.cols() != d) {
    throw std::invalid_argument("film_modulation: W_alpha shape mismatch");
  }
  Eigen::RowVectorXd h(2 * d);
  h << z_x_t, z_y_t;
  FiLMOutput out;
  out.alpha = (h * params.w_alpha + params.b_alpha)
                  .unaryExpr([](double x) { return ad::sigmoid_scalar(x); });
  out.beta = (h * params.w_beta + params.b_beta)
                 .unaryExpr([](double x) { return ad::sigmoid_scalar(x); });
  out.omega_g =
      ((out.alpha.array() + 1.0) * params.theta_l.array()).matrix() + out.beta;
  return out;
}

}  // namespace s2t
