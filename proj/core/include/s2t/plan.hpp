#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "s2t/ad.hpp"
#include "s2t/global.hpp"
#include "s2t/graph.hpp"
#include "s2t/objective.hpp"
#include "s2t/params.hpp"

namespace s2t {

// The five ablation arms.
enum class AblationMode { Hawkes, Gnn, GnnGlobal, GnnHawkes, Full };

AblationMode mode_from_string(const std::string& s);
std::string mode_to_string(AblationMode m);

inline bool mode_uses_gnn(AblationMode m) { return m != AblationMode::Hawkes; }
inline bool mode_uses_global(AblationMode m) {
  return m == AblationMode::GnnGlobal || m == AblationMode::Full;
}
inline bool mode_uses_hawkes(AblationMode m) {
  return m == AblationMode::Hawkes || m == AblationMode::GnnHawkes ||
         m == AblationMode::Full;
}
inline bool mode_uses_align(AblationMode m) {
  return m == AblationMode::GnnHawkes || m == AblationMode::Full;
}

enum class WhichLoss { Task, Align, Global, Total };

// One recursive evaluation unit at some depth: its own lower-depth index plus
// (lower-depth index, interval weight) pairs for the sequence entries.
struct GnnInstancePlan {
  int self_below = -1;
  std::vector<std::pair<int, double>> nbrs;
};

// One side of the Hawkes sum: level-0 rows of the owner's neighbors plus the
// time gaps t - t_i.
struct HawkesSidePlan {
  std::vector<int> nbr_l0;
  std::vector<double> dt;
};

struct HawkesPairPlan {
  int a_l0 = -1, b_l0 = -1;
  HawkesSidePlan side_a, side_b;
};

// One scored (a, b) pair: the positive interaction or one of its negatives.
struct ScoredRow {
  int a_inst = -1, b_inst = -1;  // top-level GNN instances
  double inv_dyn_a = 1.0, inv_dyn_b = 1.0;
  int hawkes = -1;  // index into hawkes_pairs, -1 if not needed
};

// Everything a batch forward/backward needs, frozen at collection time:
// sequence views, negative draws, dynamics weights, and the global state at
// batch start. Evaluation is then a pure function of the parameters, which
// is what the finite-difference gradient checks rely on.
struct BatchPlan {
  int dim = 0;
  int layers = 0;
  std::vector<int> level0_nodes;                    // row -> node id
  std::vector<std::vector<GnnInstancePlan>> levels; // [k-1], k = 1..layers
  std::vector<HawkesPairPlan> hawkes_pairs;
  std::vector<ScoredRow> scored;  // n_pos positives first, then negatives
  int n_pos = 0;
  int n_negs_per_pair = 0;
  std::vector<std::pair<int, double>> global_updates;  // (instance, dynamics)
  Eigen::RowVectorXd z_g_in;
  double zg_prefix_weight = 0.0;  // endpoint events already folded into z_g_in
  std::vector<Interaction> pairs;                // diagnostics
  std::vector<std::vector<NodeId>> negatives;    // drawn partner per pair
  int epoch = 0;
  int batch_index = 0;
};

struct PlanOptions {
  AblationMode mode = AblationMode::Full;
  int negatives_per_pair = 1;
};

// Snapshots the per-pair evaluation trees while replaying the batch into the
// store (each pair sees only rows applied before it), drawing negatives from
// the sampler as it goes. Mutates `store` and consumes sampler randomness.
BatchPlan collect_batch_plan(SequenceStore& store, const Batch& batch,
                             NegativeSampler& sampler, const GlobalState& g,
                             const ModelParams& params, const PlanOptions& opts,
                             int epoch, int batch_index);

using StageObserver = std::function<void(const char* stage, int index)>;

struct EvalOptions {
  AblationMode mode = AblationMode::Full;
  ad::Act act = ad::Act::Sigmoid;
  NegForm neg_form = NegForm::Paper;
  GlobalLossMode lg_mode = GlobalLossMode::Intent;
  bool freeze_global = false;    // enhancement reads z_g at batch start
  bool mean_reduction = false;   // intensity scalar via mean over dims
  bool zg_running_sum = false;   // literal accumulation instead of the mean
  WhichLoss which = WhichLoss::Total;
};

struct PlanEvalResult {
  LossBreakdown breakdown;
  double selected = 0.0;  // the WhichLoss component
  Eigen::RowVectorXd z_g_out;
  double z_g_weight_out = 0.0;
};

// Builds the tape over the plan in Algorithm-1 stage order (GNN, global
// update, enhancement, FiLM, structural intensity, temporal intensity,
// losses). When `grads_out` is non-null runs backward on the selected loss
// and accumulates per-tensor gradients.
PlanEvalResult evaluate_plan(const BatchPlan& plan, ModelParams& params,
                             const EvalOptions& opts, GradBundle* grads_out,
                             const StageObserver& observer = {});

}  // namespace s2t
