#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "s2t/global.hpp"
#include "s2t/graph.hpp"
#include "s2t/params.hpp"
#include "s2t/plan.hpp"

namespace s2t {

enum class PairFeature { Product, AbsDiff, Concat };
// Base forces raw level-0 embeddings (the untrained null-model path).
enum class ReprSource { Auto, Base };

struct EvalConfig {
  PairFeature feature = PairFeature::Product;
  ReprSource repr = ReprSource::Auto;
  std::uint64_t seed = 1;
  ad::Act gnn_act = ad::Act::Sigmoid;
  int lr_iters = 300;
  double lr_rate = 0.05;
  double l2 = 1e-4;
};

struct EvalReport {
  double accuracy = 0.0;
  double f1 = 0.0;
  int n_pos = 0;
  int n_neg = 0;
  std::uint64_t seed = 0;
  double wall_time = 0.0;
};

// One row per node: GNN output at the last training timestamp over the full
// training-time neighbor sequences, plus Eq. 7 enhancement under global
// arms (gate theta_d / max(1, training degree)). Hawkes arm and
// ReprSource::Base fall back to the base embeddings.
Eigen::MatrixXd final_representations(const ModelParams& params,
                                      const GlobalState& g,
                                      const SequenceStore& store,
                                      const TemporalGraph& train_g,
                                      AblationMode mode,
                                      const EvalConfig& cfg);

// Simple dense logistic regression with feature standardization, used for
// pair classification.
struct LogisticRegression {
  Eigen::VectorXd w;
  double b = 0.0;
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  void fit(const Eigen::MatrixXd& x, const std::vector<int>& y, int iters,
           double lr, double l2);
  double predict_proba(const Eigen::RowVectorXd& f) const;
};

// Balanced link prediction: test interactions are positives; one
// never-interacted pair is sampled per positive. The classifier is fitted on
// training interactions plus an equal number of sampled training negatives
// (rejecting only training pairs, so no test link structure leaks into the
// fit).
EvalReport evaluate_link_prediction(const ModelParams& params,
                                    const GlobalState& g,
                                    const SequenceStore& store,
                                    const TemporalGraph& train_g,
                                    const std::vector<Interaction>& test,
                                    AblationMode mode, const EvalConfig& cfg);

Eigen::RowVectorXd pair_feature(const Eigen::RowVectorXd& a,
                                const Eigen::RowVectorXd& b, PairFeature kind);

}  // namespace s2t
