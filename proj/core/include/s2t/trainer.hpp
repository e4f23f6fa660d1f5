#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "s2t/global.hpp"
#include "s2t/graph.hpp"
#include "s2t/optimizer.hpp"
#include "s2t/params.hpp"
#include "s2t/plan.hpp"

namespace s2t {

struct RunConfig {
  int dim = 128;
  int batch_size = 128;
  int negatives = 1;  // Q
  int seq_len = 10;   // S
  int layers = 2;     // l
  double lr = 0.001;
  int epochs = 50;
  double train_frac = 0.8;
  std::uint64_t seed = 1;
  AblationMode mode = AblationMode::Full;

  double neg_power = 1.0;
  bool learn_etas = false;
  double eta1 = 1.0, eta2 = 1.0;
  NegForm neg_form = NegForm::Paper;
  GlobalLossMode lg_mode = GlobalLossMode::Intent;
  ad::Act gnn_act = ad::Act::Sigmoid;
  bool freeze_global_in_batch = false;
  bool mean_reduction = false;
  // Carry z_g across epoch replays instead of re-zeroing it with the
  // rebuilt neighbor sequences.
  bool carry_global_across_epochs = false;
  // Keep z_g as the literal running sum of Eq.-6 contributions instead of
  // their running mean.
  bool zg_running_sum = false;
  double early_stop_rel_change = 1e-4;

  void validate() const;
};

struct LossRecord {
  int epoch = 0;
  int batch = 0;
  LossBreakdown loss;
};

struct TrainResult {
  ModelParams params;
  GlobalState global_state;
  SequenceStore store;  // sequences after the final epoch replay
  std::vector<LossRecord> trace;
  std::vector<double> epoch_mean_total;
  int epochs_run = 0;
  double wall_seconds = 0.0;
};

// Runs the per-batch pipeline (GNN representations, global update, node
// enhancement, FiLM, structural and temporal intensities, one Adam step per
// batch) for `epochs` or until the epoch-mean total loss changes by less
// than `early_stop_rel_change` relatively. Throws on a non-finite loss after
// dumping the offending batch.
TrainResult train(const RunConfig& cfg, const TemporalGraph& g,
                  const StageObserver& observer = {});

}  // namespace s2t
