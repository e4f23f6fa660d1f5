#pragma once

#include <cstdint>
#include <vector>

#include "s2t/graph.hpp"
#include "s2t/rng.hpp"
#include "s2t/temporal.hpp"

namespace s2t {

enum class NegForm { Paper, Conventional };      // sigma(1-x) vs sigma(-x)
enum class GlobalLossMode { Intent, Literal };   // -log sigma(.) vs +log sigma(.)

// Degree-proportional node sampler (probability ~ degree^p) backed by a
// cumulative table. Zero-degree nodes carry no mass.
class NegativeSampler {
 public:
  NegativeSampler(const std::vector<std::int64_t>& degrees, double power,
                  std::uint64_t seed);

  NodeId draw(Rng& rng) const;
  NodeId draw() { return draw(rng_); }

  // Q draws, rejecting x and the current positive partner (bounded retries,
  // then the last draw is accepted).
  std::vector<NodeId> sample_negatives(NodeId x, NodeId partner, int q);
  std::vector<NodeId> sample_negatives(NodeId x, NodeId partner, int q, Rng& rng) const;

  const std::vector<double>& cumulative() const { return cum_; }

 private:
  std::vector<double> cum_;  // cumulative probability per node id
  Rng rng_;
};

// -log sigma(pos.scalar) - sum_k log sigma(1 - neg_k.scalar) in paper form.
double task_loss(const IntensityVector& lambda_pos,
                 const std::vector<IntensityVector>& lambda_negs,
                 NegForm form = NegForm::Paper);

// Mean over dimensions of smooth-L1 (threshold 1) between the two vectors.
double alignment_loss(const IntensityVector& lambda_t,
                      const IntensityVector& lambda_s);

// Intent mode: -log sigma(-|z_x - z_g|^2 - |z_y - z_g|^2) + |alpha|^2 +
// |beta|^2. Literal mode keeps the paper's +log sigma(.), which is unbounded
// below.
double global_loss(const Eigen::RowVectorXd& z_x_t,
                   const Eigen::RowVectorXd& z_y_t,
                   const Eigen::RowVectorXd& z_g,
                   const Eigen::RowVectorXd& alpha,
                   const Eigen::RowVectorXd& beta,
                   GlobalLossMode mode = GlobalLossMode::Intent);

struct LossBreakdown {
  double task = 0.0;
  double align = 0.0;
  double global_ = 0.0;
  double total = 0.0;
  double eta1 = 1.0;
  double eta2 = 1.0;
};

LossBreakdown total_loss(double task, double align, double global_,
                         double eta1, double eta2);

}  // namespace s2t
