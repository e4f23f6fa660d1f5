#include "s2t/model_gradcheck.hpp"

#include <algorithm>
#include <sstream>

#include "s2t/synth.hpp"

namespace s2t {

std::string ModelGradcheckResult::summary() const {
  std::ostringstream os;
  os << (pass ? "GRADCHECK PASS" : "GRADCHECK FAIL") << "\n";
  for (const auto& [name, rep] : reports) {
    os << "[" << name << "] " << rep.summary();
  }
  return os.str();
}

ModelGradcheckResult run_model_gradcheck(const ModelGradcheckConfig& cfg) {
  SynthConfig synth;
  synth.num_nodes = cfg.num_nodes;
  synth.num_interactions = cfg.interactions;
  synth.communities = 4;
  synth.seed = cfg.seed;
  const TemporalGraph g = synth_graph(synth);

  ModelParams params = init_params(cfg.num_nodes, 0, cfg.dim, cfg.layers,
                                   cfg.seed, cfg.learn_etas);
  NegativeSampler sampler(g.degrees(), 1.0, cfg.seed ^ 0xfeed);
  SequenceStore store(g.num_nodes, cfg.seq_len);
  GlobalState gstate = GlobalState::zeros(cfg.dim);

  PlanOptions popts;
  popts.mode = cfg.mode;
  popts.negatives_per_pair = cfg.negatives;

  EvalOptions eopts;
  eopts.mode = cfg.mode;
  eopts.lg_mode = cfg.lg_mode;

  // Freeze the plans: sequence views, negatives, and the global state each
  // batch starts from (the chain is advanced with the unperturbed params).
  const auto batches = make_batches(g, cfg.batch_size);
  std::vector<BatchPlan> plans;
  const int n_batches =
      std::min<int>(cfg.n_batches, static_cast<int>(batches.size()));
  for (int bi = 0; bi < n_batches; ++bi) {
    plans.push_back(collect_batch_plan(store, batches[static_cast<size_t>(bi)],
                                       sampler, gstate, params, popts, 1, bi));
    const auto fwd = evaluate_plan(plans.back(), params, eopts, nullptr);
    gstate.z_g = fwd.z_g_out;
    gstate.weight = fwd.z_g_weight_out;
  }

  const std::vector<std::pair<std::string, WhichLoss>> kinds = {
      {"task", WhichLoss::Task},
      {"align", WhichLoss::Align},
      {"global", WhichLoss::Global},
      {"total", WhichLoss::Total},
  };

  ModelGradcheckResult result;
  result.pass = true;
  GradBundle grads = GradBundle::zeros_like(params);
  for (const auto& [name, which] : kinds) {
    GradReport merged;
    merged.tolerance = cfg.tolerance;
    EvalOptions opts = eopts;
    opts.which = which;
    for (const auto& plan : plans) {
      evaluate_plan(plan, params, opts, &grads);
      auto loss_eval = [&]() {
        return evaluate_plan(plan, params, opts, nullptr).selected;
      };
      const auto rep = finite_difference_check(
          loss_eval, params, grads, cfg.eps, cfg.tolerance, 32,
          cfg.seed + static_cast<std::uint64_t>(plan.batch_index));
      if (merged.entries.empty()) {
        merged.entries = rep.entries;
      } else {
        for (size_t i = 0; i < merged.entries.size(); ++i) {
          merged.entries[i].max_rel_err = std::max(
              merged.entries[i].max_rel_err, rep.entries[i].max_rel_err);
          merged.entries[i].coords_checked += rep.entries[i].coords_checked;
        }
      }
      merged.max_rel_err = std::max(merged.max_rel_err, rep.max_rel_err);
    }
    merged.pass = merged.max_rel_err < cfg.tolerance;
    result.pass = result.pass && merged.pass;
    result.reports.emplace_back(name, std::move(merged));
  }
  return result;
}

}  // namespace s2t
