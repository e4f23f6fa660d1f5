#include <doctest.h>

#include <cmath>
#include <map>

#include "s2t/ad.hpp"
#include "s2t/model_gradcheck.hpp"
#include "s2t/plan.hpp"
#include "s2t/structural.hpp"
#include "s2t/synth.hpp"
#include "s2t/temporal.hpp"
#include "testutil.hpp"

using namespace s2t;

namespace {

struct Fixture {
  TemporalGraph g;
  ModelParams params;
  SequenceStore store;
  NegativeSampler sampler;
  GlobalState gstate;

  Fixture(int nodes, long events, int dim, int seq_len, int layers,
          std::uint64_t seed)
      : g(synth_graph({.num_nodes = nodes,
                       .num_interactions = events,
                       .communities = 4,
                       .seed = seed})),
        params(init_params(nodes, 0, dim, layers, seed)),
        store(g.num_nodes, seq_len),
        sampler(g.degrees(), 1.0, seed ^ 0xfeed),
        gstate(GlobalState::zeros(dim)) {}
};

// Mirrors the documented batch pipeline with the standalone module
// functions; shares no code with the tape assembly.
LossBreakdown reference_batch_loss(const SequenceStore& store_at_start,
                                   const Eigen::RowVectorXd& z_g_in,
                                   const ModelParams& params, const Batch& batch,
                                   const BatchPlan& plan, AblationMode mode) {
  SequenceStore store = store_at_start;
  const int n_pos = static_cast<int>(batch.pairs.size());
  const bool use_gnn = mode_uses_gnn(mode);
  const bool use_global = mode_uses_global(mode);

  auto dyn = [&](NodeId v) {
    auto it = batch.dynamics.find(v);
    return it == batch.dynamics.end() ? 1 : it->second;
  };

  struct PerPair {
    Eigen::RowVectorXd zx, zy;
    std::vector<Eigen::RowVectorXd> znegs;
    IntensityVector lt;
    std::vector<IntensityVector> lt_negs;
  };
  std::vector<PerPair> rows(static_cast<size_t>(n_pos));

  // Stage A: representations and temporal intensities against the evolving
  // store, then apply the row.
  for (int j = 0; j < n_pos; ++j) {
    const auto& e = batch.pairs[static_cast<size_t>(j)];
    auto& row = rows[static_cast<size_t>(j)];
    if (use_gnn) {
      row.zx = node_representation(e.src, e.time, params.layers, store, params);
      row.zy = node_representation(e.dst, e.time, params.layers, store, params);
      for (NodeId k : plan.negatives[static_cast<size_t>(j)]) {
        row.znegs.push_back(
            node_representation(k, e.time, params.layers, store, params));
      }
    }
    if (mode_uses_hawkes(mode)) {
      row.lt = temporal_intensity(e.src, e.dst, e.time, store, params);
      if (mode == AblationMode::Hawkes) {
        for (NodeId k : plan.negatives[static_cast<size_t>(j)]) {
          row.lt_negs.push_back(
              temporal_intensity(e.src, k, e.time, store, params));
        }
      }
    }
    store.apply(e);
  }

  // Stage B: global update over every endpoint occurrence, then the mean
  // normalization the trainer applies on top of the Eq.-6 contributions.
  GlobalState gs{z_g_in, plan.zg_prefix_weight};
  if (use_global) {
    int events = 0;
    for (int j = 0; j < n_pos; ++j) {
      const auto& e = batch.pairs[static_cast<size_t>(j)];
      update_global(gs, rows[static_cast<size_t>(j)].zx, params.theta_d, dyn(e.src));
      events++;
      if (e.dst != e.src) {
        update_global(gs, rows[static_cast<size_t>(j)].zy, params.theta_d, dyn(e.dst));
        events++;
      }
    }
    const double n0 = plan.zg_prefix_weight;
    gs.z_g = (n0 * z_g_in + (gs.z_g - z_g_in)) / (n0 + events);
    gs.weight = n0 + events;
  }

  // Stage C/D/E: enhancement, FiLM, intensities, losses.
  double task = 0.0, align = 0.0, global_ = 0.0;
  for (int j = 0; j < n_pos; ++j) {
    const auto& e = batch.pairs[static_cast<size_t>(j)];
    auto& row = rows[static_cast<size_t>(j)];
    IntensityVector ls_pos;
    std::vector<IntensityVector> ls_negs;
    Eigen::RowVectorXd ex, ey;
    FiLMOutput film_pos;
    if (use_gnn) {
      ex = use_global ? enhance_node(row.zx, gs, params.theta_d, dyn(e.src)) : row.zx;
      ey = use_global ? enhance_node(row.zy, gs, params.theta_d, dyn(e.dst)) : row.zy;
      Eigen::RowVectorXd omega = Eigen::RowVectorXd::Ones(params.dim);
      if (use_global) {
        film_pos = film_modulation(ex, ey, params);
        omega = film_pos.omega_g;
      }
      ls_pos = local_intensity(ex, ey, omega);
      for (size_t k = 0; k < row.znegs.size(); ++k) {
        const NodeId kn = plan.negatives[static_cast<size_t>(j)][k];
        Eigen::RowVectorXd ek = use_global
                                    ? enhance_node(row.znegs[k], gs,
                                                   params.theta_d, dyn(kn))
                                    : row.znegs[k];
        Eigen::RowVectorXd omega_k = Eigen::RowVectorXd::Ones(params.dim);
        if (use_global) omega_k = film_modulation(ex, ek, params).omega_g;
        ls_negs.push_back(local_intensity(ex, ek, omega_k));
      }
    }

    if (mode == AblationMode::Hawkes) {
      task += task_loss(row.lt, row.lt_negs);
    } else {
      task += task_loss(ls_pos, ls_negs);
    }
    if (mode_uses_align(mode)) {
      align += alignment_loss(row.lt, ls_pos);
    }
    if (use_global) {
      global_ += global_loss(ex, ey, gs.z_g, film_pos.alpha, film_pos.beta);
    }
  }
  task /= n_pos;
  align /= n_pos;
  global_ /= n_pos;
  return total_loss(task, align, global_, params.eta1_effective(),
                    params.eta2_effective());
}

}  // namespace

TEST_CASE("plan: tape loss matches the standalone-pipeline reference") {
  for (const auto mode : {AblationMode::Full, AblationMode::Gnn,
                          AblationMode::GnnGlobal, AblationMode::GnnHawkes,
                          AblationMode::Hawkes}) {
    CAPTURE(mode_to_string(mode));
    Fixture fx(14, 70, 6, 3, 2, 77);
    const auto batches = make_batches(fx.g, 5);
    PlanOptions popts{mode, 2};
    EvalOptions eopts;
    eopts.mode = mode;
    for (int bi = 0; bi < 3; ++bi) {
      const SequenceStore store_before = fx.store;
      BatchPlan plan =
          collect_batch_plan(fx.store, batches[static_cast<size_t>(bi)],
                             fx.sampler, fx.gstate, fx.params, popts, 1, bi);
      const auto got = evaluate_plan(plan, fx.params, eopts, nullptr);
      const auto want = reference_batch_loss(store_before, fx.gstate.z_g,
                                             fx.params,
                                             batches[static_cast<size_t>(bi)],
                                             plan, mode);
      CHECK(got.breakdown.task == doctest::Approx(want.task).epsilon(1e-10));
      CHECK(got.breakdown.align == doctest::Approx(want.align).epsilon(1e-10));
      CHECK(got.breakdown.global_ ==
            doctest::Approx(want.global_).epsilon(1e-10));
      CHECK(got.breakdown.total == doctest::Approx(want.total).epsilon(1e-10));
      fx.gstate.z_g = got.z_g_out;
      fx.gstate.weight = got.z_g_weight_out;
    }
  }
}

TEST_CASE("plan: z_g carries theta_d-weighted endpoint sum") {
  Fixture fx(10, 40, 4, 3, 1, 31);
  const auto batches = make_batches(fx.g, 4);
  PlanOptions popts{AblationMode::Full, 1};
  EvalOptions eopts;
  BatchPlan plan = collect_batch_plan(fx.store, batches[0], fx.sampler,
                                      fx.gstate, fx.params, popts, 1, 0);
  const auto out = evaluate_plan(plan, fx.params, eopts, nullptr);
  CHECK(out.z_g_out.cols() == 4);
  CHECK(!out.z_g_out.isZero());  // theta_d = 0.1, sigmoid reps > 0

  // theta_d = 0 keeps z_g fixed
  fx.params.theta_d = 0.0;
  const auto frozen = evaluate_plan(plan, fx.params, eopts, nullptr);
  CHECK(frozen.z_g_out == plan.z_g_in);
}

TEST_CASE("plan: freeze_global uses batch-start z_g for the losses") {
  Fixture fx(10, 40, 4, 3, 1, 32);
  fx.gstate.z_g = Eigen::RowVectorXd::Constant(4, 0.25);
  const auto batches = make_batches(fx.g, 6);
  PlanOptions popts{AblationMode::Full, 1};
  BatchPlan plan = collect_batch_plan(fx.store, batches[0], fx.sampler,
                                      fx.gstate, fx.params, popts, 1, 0);
  EvalOptions live, frozen;
  frozen.freeze_global = true;
  const auto a = evaluate_plan(plan, fx.params, live, nullptr);
  const auto b = evaluate_plan(plan, fx.params, frozen, nullptr);
  // Same carry either way, different loss inputs.
  CHECK(a.z_g_out == b.z_g_out);
  CHECK(a.breakdown.total != b.breakdown.total);
}

TEST_CASE("plan: stage events follow the pipeline order contract") {
  Fixture fx(12, 50, 4, 3, 2, 33);
  const auto batches = make_batches(fx.g, 4);
  PlanOptions popts{AblationMode::Full, 1};
  EvalOptions eopts;
  BatchPlan plan = collect_batch_plan(fx.store, batches[0], fx.sampler,
                                      fx.gstate, fx.params, popts, 1, 0);
  std::vector<std::string> order;
  evaluate_plan(plan, fx.params, eopts, nullptr,
                [&](const char* stage, int) { order.push_back(stage); });
  const std::map<std::string, int> rank = {
      {"gnn", 0},     {"global_update", 1}, {"enhance", 2},
      {"film", 3},    {"lambda_s", 4},      {"lambda_t", 5}};
  REQUIRE(!order.empty());
  int prev = -1;
  bool saw[6] = {false, false, false, false, false, false};
  for (const auto& s : order) {
    const int r = rank.at(s);
    CHECK(r >= prev);
    prev = r;
    saw[r] = true;
  }
  for (bool s : saw) CHECK(s);
}

TEST_CASE("plan: analytic gradients match finite differences (all loss terms)") {
  ModelGradcheckConfig cfg;
  cfg.num_nodes = 12;
  cfg.interactions = 36;
  cfg.dim = 6;
  cfg.seq_len = 3;
  cfg.layers = 2;
  cfg.batch_size = 4;
  cfg.n_batches = 2;
  cfg.seed = 5;
  const auto result = run_model_gradcheck(cfg);
  INFO(result.summary());
  CHECK(result.pass);
}

TEST_CASE("plan: gradcheck with learnable etas and literal global loss") {
  ModelGradcheckConfig cfg;
  cfg.num_nodes = 12;
  cfg.interactions = 36;
  cfg.dim = 5;
  cfg.seq_len = 3;
  cfg.layers = 2;
  cfg.batch_size = 4;
  cfg.n_batches = 2;
  cfg.seed = 6;
  cfg.learn_etas = true;
  cfg.lg_mode = GlobalLossMode::Literal;
  const auto result = run_model_gradcheck(cfg);
  INFO(result.summary());
  CHECK(result.pass);
}

TEST_CASE("plan: gradcheck across ablation arms") {
  for (const auto mode : {AblationMode::Hawkes, AblationMode::Gnn,
                          AblationMode::GnnGlobal, AblationMode::GnnHawkes}) {
    CAPTURE(mode_to_string(mode));
    ModelGradcheckConfig cfg;
    cfg.num_nodes = 10;
    cfg.interactions = 30;
    cfg.dim = 4;
    cfg.seq_len = 3;
    cfg.layers = 2;
    cfg.batch_size = 5;
    cfg.n_batches = 1;
    cfg.seed = 7;
    cfg.mode = mode;
    const auto result = run_model_gradcheck(cfg);
    INFO(result.summary());
    CHECK(result.pass);
  }
}

TEST_CASE("plan: hawkes arm loss carries no structural terms") {
  Fixture fx(10, 40, 4, 3, 1, 34);
  const auto batches = make_batches(fx.g, 4);
  PlanOptions popts{AblationMode::Hawkes, 1};
  EvalOptions eopts;
  eopts.mode = AblationMode::Hawkes;
  BatchPlan plan = collect_batch_plan(fx.store, batches[0], fx.sampler,
                                      fx.gstate, fx.params, popts, 1, 0);
  const auto out = evaluate_plan(plan, fx.params, eopts, nullptr);
  CHECK(out.breakdown.align == 0.0);
  CHECK(out.breakdown.global_ == 0.0);
  CHECK(out.breakdown.task > 0.0);
  CHECK(out.z_g_out.isZero());
}
