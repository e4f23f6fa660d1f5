#include "s2t/trainer.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace s2t {

void RunConfig::validate() const {
  if (dim < 1 || batch_size < 1 || negatives < 1 || seq_len < 1 || layers < 1) {
    throw std::invalid_argument("RunConfig: counts must be >= 1");
  }
  if (epochs < 0) throw std::invalid_argument("RunConfig: epochs must be >= 0");
  if (!(lr > 0.0)) throw std::invalid_argument("RunConfig: lr must be > 0");
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw std::invalid_argument("RunConfig: train_frac must be in (0,1)");
  }
}

namespace {

std::string describe_batch(const BatchPlan& plan) {
  std::ostringstream os;
  os << "epoch " << plan.epoch << " batch " << plan.batch_index << " pairs:";
  const size_t show = std::min<size_t>(plan.pairs.size(), 8);
  for (size_t i = 0; i < show; ++i) {
    os << " (" << plan.pairs[i].src << "," << plan.pairs[i].dst << ","
       << plan.pairs[i].time << ")";
  }
  if (show < plan.pairs.size()) os << " ...";
  return os.str();
}

}  // namespace

TrainResult train(const RunConfig& cfg, const TemporalGraph& g,
                  const StageObserver& observer) {
  cfg.validate();
  if (g.interactions.empty()) {
    throw std::invalid_argument("train: empty graph");
  }
  const auto t_start = std::chrono::steady_clock::now();

  const int feat_dim = g.features ? static_cast<int>(g.features->cols()) : 0;
  ModelParams params = init_params(g.num_nodes, feat_dim, cfg.dim, cfg.layers,
                                   cfg.seed, cfg.learn_etas);
  if (g.features) params.features = g.features;
  params.eta1 = cfg.eta1;
  params.eta2 = cfg.eta2;

  AdamState adam = AdamState::init(params, cfg.lr);
  GradBundle grads = GradBundle::zeros_like(params);
  NegativeSampler sampler(g.degrees(), cfg.neg_power, cfg.seed ^ 0x9e3779b97f4a7c15ULL);

  const auto batches = make_batches(g, cfg.batch_size);

  TrainResult result{std::move(params), GlobalState::zeros(cfg.dim),
                     SequenceStore(g.num_nodes, cfg.seq_len)};

  PlanOptions plan_opts;
  plan_opts.mode = cfg.mode;
  plan_opts.negatives_per_pair = cfg.negatives;

  EvalOptions eval_opts;
  eval_opts.mode = cfg.mode;
  eval_opts.act = cfg.gnn_act;
  eval_opts.neg_form = cfg.neg_form;
  eval_opts.lg_mode = cfg.lg_mode;
  eval_opts.freeze_global = cfg.freeze_global_in_batch;
  eval_opts.mean_reduction = cfg.mean_reduction;
  eval_opts.zg_running_sum = cfg.zg_running_sum;
  eval_opts.which = WhichLoss::Total;

  double prev_epoch_mean = 0.0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    result.store.reset();
    if (!cfg.carry_global_across_epochs) {
      result.global_state = GlobalState::zeros(cfg.dim);
    }
    double epoch_total = 0.0;
    for (size_t bi = 0; bi < batches.size(); ++bi) {
      BatchPlan plan =
          collect_batch_plan(result.store, batches[bi], sampler,
                             result.global_state, result.params, plan_opts,
                             epoch, static_cast<int>(bi));
      PlanEvalResult ev = evaluate_plan(plan, result.params, eval_opts, &grads,
                                        observer);
      if (!std::isfinite(ev.breakdown.total)) {
        std::cerr << "non-finite loss; offending batch: " << describe_batch(plan)
                  << std::endl;
        throw std::runtime_error("train: non-finite loss at epoch " +
                                 std::to_string(epoch) + " batch " +
                                 std::to_string(bi));
      }
      adam_step(result.params, grads, adam);
      if (observer) observer("optimize", static_cast<int>(bi));
      result.global_state.z_g = ev.z_g_out;
      result.global_state.weight = ev.z_g_weight_out;
      result.trace.push_back({epoch, static_cast<int>(bi), ev.breakdown});
      epoch_total += ev.breakdown.total;
    }
    const double epoch_mean = epoch_total / static_cast<double>(batches.size());
    result.epoch_mean_total.push_back(epoch_mean);
    result.epochs_run = epoch;
    if (epoch > 1) {
      const double rel = std::abs(epoch_mean - prev_epoch_mean) /
                         std::max(1.0, std::abs(prev_epoch_mean));
      if (rel < cfg.early_stop_rel_change) break;
    }
    prev_epoch_mean = epoch_mean;
  }

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return result;
}

}  // namespace s2t
