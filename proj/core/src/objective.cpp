#include "s2t/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "s2t/ad.hpp"

namespace s2t {

NegativeSampler::NegativeSampler(const std::vector<std::int64_t>& degrees,
                                 double power, std::uint64_t seed)
    : rng_(seed) {
  if (degrees.size() < 2) {
    throw std::invalid_argument("NegativeSampler: need at least two nodes");
  }
  cum_.resize(degrees.size(), 0.0);
  double total = 0.0;
  for (size_t i = 0; i < degrees.size(); ++i) {
    const double mass =
        degrees[i] > 0 ? std::pow(static_cast<double>(degrees[i]), power) : 0.0;
    total += mass;
    cum_[i] = total;
  }
  if (total <= 0.0) {
    throw std::invalid_argument("NegativeSampler: all degrees are zero");
  }
  for (double& c : cum_) c /= total;
  cum_.back() = 1.0;
}

NodeId NegativeSampler::draw(Rng& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  return static_cast<NodeId>(std::distance(cum_.begin(), it));
}

std::vector<NodeId> NegativeSampler::sample_negatives(NodeId x, NodeId partner,
                                                      int q) {
  return sample_negatives(x, partner, q, rng_);
}

std::vector<NodeId> NegativeSampler::sample_negatives(NodeId x, NodeId partner,
                                                      int q, Rng& rng) const {
  if (q < 1) throw std::invalid_argument("sample_negatives: Q must be >= 1");
  std::vector<NodeId> out;
  out.reserve(static_cast<size_t>(q));
  for (int k = 0; k < q; ++k) {
    NodeId n = draw(rng);
    for (int attempt = 0; attempt < 100 && (n == x || n == partner); ++attempt) {
      n = draw(rng);
    }
    out.push_back(n);
  }
  return out;
}

double task_loss(const IntensityVector& lambda_pos,
                 const std::vector<IntensityVector>& lambda_negs,
                 NegForm form) {
  if (lambda_negs.empty()) {
    throw std::invalid_argument("task_loss: need at least one negative");
  }
  // -log sigma(u) == softplus(-u)
  double loss = ad::softplus_scalar(-lambda_pos.scalar);
  for (const auto& neg : lambda_negs) {
    const double u =
        form == NegForm::Paper ? 1.0 - neg.scalar : -neg.scalar;
    loss += ad::softplus_scalar(-u);
  }
  return loss;
}

double alignment_loss(const IntensityVector& lambda_t,
                      const IntensityVector& lambda_s) {
  if (lambda_t.vec.cols() != lambda_s.vec.cols()) {
    throw std::invalid_argument("alignment_loss: dimension mismatch");
  }
  const auto e = (lambda_t.vec - lambda_s.vec).eval();
  double acc = 0.0;
  for (long j = 0; j < e.cols(); ++j) {
    const double x = e(j);
    acc += (std::abs(x) < 1.0) ? 0.5 * x * x : std::abs(x) - 0.5;
  }
  return acc / static_cast<double>(e.cols());
}

double global_loss(const Eigen::RowVectorXd& z_x_t,
                   const Eigen::RowVectorXd& z_y_t,
                   const Eigen::RowVectorXd& z_g,
                   const Eigen::RowVectorXd& alpha,
                   const Eigen::RowVectorXd& beta, GlobalLossMode mode) {
  if (z_x_t.cols() != z_g.cols() || z_y_t.cols() != z_g.cols()) {
    throw std::invalid_argument("global_loss: dimension mismatch");
  }
  // Squared norms are dimension-averaged, matching the alignment loss's
  // mean-over-dimensions convention.
  const double d = static_cast<double>(z_g.cols());
  const double sq =
      ((z_x_t - z_g).squaredNorm() + (z_y_t - z_g).squaredNorm()) / d;
  const double reg =
      alpha.squaredNorm() / static_cast<double>(alpha.cols()) +
      beta.squaredNorm() / static_cast<double>(beta.cols());
  // -log sigma(-sq) == softplus(sq)
  const double nll = ad::softplus_scalar(sq);
  return (mode == GlobalLossMode::Intent ? nll : -nll) + reg;
}

LossBreakdown total_loss(double task, double align, double global_,
                         double eta1, double eta2) {
  if (eta1 < 0.0 || eta2 < 0.0) {
    throw std::invalid_argument("total_loss: eta weights must be >= 0");
  }
  LossBreakdown b;
  b.task = task;
  b.align = align;
  b.global_ = global_;
  b.eta1 = eta1;
  b.eta2 = eta2;
  b.total = task + eta1 * align + eta2 * global_;
  return b;
}

}  // namespace s2t
