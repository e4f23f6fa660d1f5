#include "s2t/plan.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "s2t/structural.hpp"

namespace s2t {

AblationMode mode_from_string(const std::string& s) {
  if (s == "hawkes") return AblationMode::Hawkes;
  if (s == "gnn") return AblationMode::Gnn;
  if (s == "gnn_global") return AblationMode::GnnGlobal;
  if (s == "gnn_hawkes") return AblationMode::GnnHawkes;
  if (s == "full") return AblationMode::Full;
  throw std::invalid_argument("unknown ablation mode: " + s);
}

std::string mode_to_string(AblationMode m) {
  switch (m) {
    case AblationMode::Hawkes: return "hawkes";
    case AblationMode::Gnn: return "gnn";
    case AblationMode::GnnGlobal: return "gnn_global";
    case AblationMode::GnnHawkes: return "gnn_hawkes";
    case AblationMode::Full: return "full";
  }
  return "?";
}

namespace {

struct InstanceKey {
  NodeId node;
  std::uint32_t version;
  double time;
  bool operator==(const InstanceKey& o) const {
    return node == o.node && version == o.version && time == o.time;
  }
};

struct InstanceKeyHash {
  std::size_t operator()(const InstanceKey& k) const {
    std::size_t h = std::hash<NodeId>()(k.node);
    h ^= std::hash<std::uint32_t>()(k.version) + 0x9e3779b9 + (h << 6) + (h >> 2);
    h ^= std::hash<double>()(k.time) + 0x9e3779b9 + (h << 6) + (h >> 2);
    return h;
  }
};

// Builds plan rows during one batch replay.
class Collector {
 public:
  Collector(SequenceStore& store, BatchPlan& plan) : store_(store), plan_(plan) {}

  int level0_index(NodeId node) {
    auto it = l0_map_.find(node);
    if (it != l0_map_.end()) return it->second;
    const int idx = static_cast<int>(plan_.level0_nodes.size());
    plan_.level0_nodes.push_back(node);
    l0_map_.emplace(node, idx);
    return idx;
  }

  // Snapshot of the depth-`depth` evaluation of `node` at time `t` against
  // the current store state. Returns an index into plan_.levels[depth-1]
  // (or the level-0 row for depth 0). Memoized on (node, version, time).
  int collect_instance(NodeId node, double t, int depth) {
    if (depth == 0) return level0_index(node);
    InstanceKey key{node, store_.version(node), t};
    auto& memo = inst_map_[static_cast<size_t>(depth - 1)];
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;

    GnnInstancePlan inst;
    inst.self_below = collect_instance(node, t, depth - 1);
    const auto view = store_.neighbors_at(node).view(t);
    if (!view.empty()) {
      const auto w = interval_weights(view, t);
      inst.nbrs.reserve(view.size());
      for (size_t i = 0; i < view.size(); ++i) {
        inst.nbrs.emplace_back(
            collect_instance(view[i].neighbor, view[i].time, depth - 1), w[i]);
      }
    }
    auto& level = plan_.levels[static_cast<size_t>(depth - 1)];
    const int idx = static_cast<int>(level.size());
    level.push_back(std::move(inst));
    memo.emplace(key, idx);
    return idx;
  }

  HawkesSidePlan collect_hawkes_side(NodeId owner, double t) {
    HawkesSidePlan side;
    const auto view = store_.neighbors_at(owner).view(t);
    side.nbr_l0.reserve(view.size());
    side.dt.reserve(view.size());
    for (const auto& e : view) {
      side.nbr_l0.push_back(level0_index(e.neighbor));
      side.dt.push_back(t - e.time);
    }
    return side;
  }

  void prepare_levels(int layers) {
    plan_.levels.resize(static_cast<size_t>(layers));
    inst_map_.resize(static_cast<size_t>(layers));
  }

 private:
  SequenceStore& store_;
  BatchPlan& plan_;
  std::unordered_map<NodeId, int> l0_map_;
  std::vector<std::unordered_map<InstanceKey, int, InstanceKeyHash>> inst_map_;
};

}  // namespace

BatchPlan collect_batch_plan(SequenceStore& store, const Batch& batch,
                             NegativeSampler& sampler, const GlobalState& g,
                             const ModelParams& params, const PlanOptions& opts,
                             int epoch, int batch_index) {
  if (batch.pairs.empty()) {
    throw std::invalid_argument("collect_batch_plan: empty batch");
  }
  BatchPlan plan;
  plan.dim = params.dim;
  plan.layers = params.layers;
  plan.n_pos = static_cast<int>(batch.pairs.size());
  plan.n_negs_per_pair = opts.negatives_per_pair;
  plan.z_g_in = g.z_g;
  plan.zg_prefix_weight = g.weight;
  plan.pairs = batch.pairs;
  plan.epoch = epoch;
  plan.batch_index = batch_index;

  const bool use_gnn = mode_uses_gnn(opts.mode);
  const bool use_global = mode_uses_global(opts.mode);
  const bool hawkes_for_pos = mode_uses_hawkes(opts.mode);
  const bool hawkes_for_negs = opts.mode == AblationMode::Hawkes;

  Collector col(store, plan);
  col.prepare_levels(params.layers);

  auto dynamics_of = [&](NodeId n) {
    auto it = batch.dynamics.find(n);
    return it == batch.dynamics.end() ? 1 : it->second;
  };

  std::vector<std::vector<NodeId>> negs(batch.pairs.size());
  std::vector<ScoredRow> neg_rows;
  neg_rows.reserve(batch.pairs.size() *
                   static_cast<size_t>(opts.negatives_per_pair));

  for (size_t j = 0; j < batch.pairs.size(); ++j) {
    const Interaction& e = batch.pairs[j];
    const double t = e.time;
    negs[j] = sampler.sample_negatives(e.src, e.dst, opts.negatives_per_pair);

    ScoredRow pos;
    if (use_gnn) {
      pos.a_inst = col.collect_instance(e.src, t, params.layers);
      pos.b_inst = col.collect_instance(e.dst, t, params.layers);
      pos.inv_dyn_a = 1.0 / static_cast<double>(dynamics_of(e.src));
      pos.inv_dyn_b = 1.0 / static_cast<double>(dynamics_of(e.dst));
      // Endpoint occurrences feed the global update in chronological pair
      // order (once for a self-loop).
      if (use_global) {
        plan.global_updates.emplace_back(
            pos.a_inst, static_cast<double>(dynamics_of(e.src)));
        if (e.dst != e.src) {
          plan.global_updates.emplace_back(
              pos.b_inst, static_cast<double>(dynamics_of(e.dst)));
        }
      }
    }
    if (hawkes_for_pos) {
      HawkesPairPlan hp;
      hp.a_l0 = col.level0_index(e.src);
      hp.b_l0 = col.level0_index(e.dst);
      hp.side_a = col.collect_hawkes_side(e.src, t);
      hp.side_b = col.collect_hawkes_side(e.dst, t);
      pos.hawkes = static_cast<int>(plan.hawkes_pairs.size());
      plan.hawkes_pairs.push_back(std::move(hp));
    }
    plan.scored.push_back(pos);

    for (NodeId k : negs[j]) {
      ScoredRow neg;
      if (use_gnn) {
        neg.a_inst = pos.a_inst;
        neg.b_inst = col.collect_instance(k, t, params.layers);
        neg.inv_dyn_a = pos.inv_dyn_a;
        neg.inv_dyn_b = 1.0 / static_cast<double>(dynamics_of(k));
      }
      if (hawkes_for_negs) {
        HawkesPairPlan hp;
        hp.a_l0 = col.level0_index(e.src);
        hp.b_l0 = col.level0_index(k);
        hp.side_a = col.collect_hawkes_side(e.src, t);
        hp.side_b = col.collect_hawkes_side(k, t);
        neg.hawkes = static_cast<int>(plan.hawkes_pairs.size());
        plan.hawkes_pairs.push_back(std::move(hp));
      }
      neg_rows.push_back(neg);
    }

    store.apply(e);
  }

  // Positives occupy rows [0, n_pos); negatives follow pair-major.
  plan.scored.insert(plan.scored.end(), neg_rows.begin(), neg_rows.end());
  plan.negatives = std::move(negs);
  return plan;
}

namespace {

struct HawkesVars {
  ad::Var vec;     // 1 x d
  ad::Var scalar;  // 1 x 1
};

// lambda^T of one pair from level-0 rows.
HawkesVars build_hawkes_pair(ad::Tape& tape, const HawkesPairPlan& hp,
                             ad::Var z0, ad::Var delta, bool mean_reduction,
                             int dim) {
  const ad::Var z_a = tape.gather_rows(z0, {hp.a_l0});
  const ad::Var z_b = tape.gather_rows(z0, {hp.b_l0});
  ad::Var acc = tape.neg_sq(tape.sub(z_a, z_b));

  auto side = [&](const HawkesSidePlan& sp, ad::Var z_owner, ad::Var z_other) {
    if (sp.nbr_l0.empty()) return;
    const ad::Var g = tape.gather_rows(z0, sp.nbr_l0);
    const ad::Var logits = tape.row_sum(tape.neg_sq(tape.sub_rowvec(g, z_owner)));
    const ad::Var s = tape.softmax_col(logits);
    const ad::Var f = tape.exp_neg_scale(delta, sp.dt);
    const ad::Var a = tape.hadamard(s, f);
    const ad::Var mu = tape.neg_sq(tape.sub_rowvec(g, z_other));
    acc = tape.add(acc, tape.matmul(tape.transpose(a), mu));
  };
  side(hp.side_a, z_a, z_b);
  side(hp.side_b, z_b, z_a);

  HawkesVars out;
  out.vec = acc;
  out.scalar = tape.sum(acc);
  if (mean_reduction) {
    out.scalar = tape.scale(out.scalar, 1.0 / static_cast<double>(dim));
  }
  return out;
}

}  // namespace

PlanEvalResult evaluate_plan(const BatchPlan& plan, ModelParams& params,
                             const EvalOptions& opts, GradBundle* grads_out,
                             const StageObserver& observer) {
  const bool use_gnn = mode_uses_gnn(opts.mode);
  const bool use_global = mode_uses_global(opts.mode);
  const bool use_align = mode_uses_align(opts.mode);
  const bool use_lg = use_global;
  const bool task_on_hawkes = opts.mode == AblationMode::Hawkes;
  const bool want_grads = grads_out != nullptr;

  auto note = [&](const char* stage, int idx) {
    if (observer) observer(stage, idx);
  };

  ad::Tape tape;

  // Parameter leaves.
  const ad::Var w0 = tape.input(params.w0, want_grads);
  std::vector<ad::Var> w_self(static_cast<size_t>(params.layers));
  std::vector<ad::Var> w_nbr(static_cast<size_t>(params.layers));
  if (use_gnn) {
    for (int l = 0; l < params.layers; ++l) {
      w_self[static_cast<size_t>(l)] =
          tape.input(params.w_self[static_cast<size_t>(l)], want_grads);
      w_nbr[static_cast<size_t>(l)] =
          tape.input(params.w_nbr[static_cast<size_t>(l)], want_grads);
    }
  }
  ad::Var delta_v, theta_d_v, theta_l_v, w_alpha_v, b_alpha_v, w_beta_v, b_beta_v;
  const bool need_hawkes = !plan.hawkes_pairs.empty();
  if (need_hawkes) delta_v = tape.scalar(params.delta_t, want_grads);
  if (use_global) {
    theta_d_v = tape.scalar(params.theta_d, want_grads);
    theta_l_v = tape.input(params.theta_l, want_grads);
    w_alpha_v = tape.input(params.w_alpha, want_grads);
    b_alpha_v = tape.input(params.b_alpha, want_grads);
    w_beta_v = tape.input(params.w_beta, want_grads);
    b_beta_v = tape.input(params.b_beta, want_grads);
  }

  // Level-0 embeddings for every referenced node.
  ad::Var z0;
  if (params.features) {
    Eigen::MatrixXd feat_rows(static_cast<long>(plan.level0_nodes.size()),
                              params.feat_dim);
    for (size_t r = 0; r < plan.level0_nodes.size(); ++r) {
      feat_rows.row(static_cast<long>(r)) =
          params.features->row(plan.level0_nodes[r]);
    }
    z0 = tape.matmul(tape.constant(std::move(feat_rows)), w0);
  } else {
    std::vector<int> idx(plan.level0_nodes.begin(), plan.level0_nodes.end());
    z0 = tape.gather_rows(w0, idx);
  }

  // GNN levels, bottom-up.
  ad::Var z_top = z0;
  if (use_gnn) {
    ad::Var z_prev = z0;
    for (int k = 1; k <= params.layers; ++k) {
      const auto& level = plan.levels[static_cast<size_t>(k - 1)];
      std::vector<int> self_idx;
      self_idx.reserve(level.size());
      std::vector<std::vector<std::pair<int, double>>> groups;
      groups.reserve(level.size());
      for (const auto& inst : level) {
        self_idx.push_back(inst.self_below);
        groups.push_back(inst.nbrs);
      }
      const ad::Var self_m = tape.gather_rows(z_prev, self_idx);
      const ad::Var agg_m = tape.wsum_rows(z_prev, std::move(groups));
      const ad::Var pre =
          tape.add(tape.matmul(self_m, w_self[static_cast<size_t>(k - 1)]),
                   tape.matmul(agg_m, w_nbr[static_cast<size_t>(k - 1)]));
      z_prev = tape.activation(pre, opts.act);
    }
    z_top = z_prev;
    for (int p = 0; p < plan.n_pos; ++p) note("gnn", p);
  }

  // Global representation update (Eq. 6), then enhancement (Eq. 7). The
  // per-event contribution is theta_d * dynamics * z; by default z_g tracks
  // the running MEAN of those contributions rather than their unbounded sum
  // (which would grow linearly with stream length and drown the node
  // representations it is meant to complement).
  ad::Var zg_used;
  ad::Var zg_out;
  Eigen::RowVectorXd zg_out_value = plan.z_g_in;
  double zg_weight_out = plan.zg_prefix_weight;
  if (use_global) {
    const ad::Var zg_in = tape.constant(plan.z_g_in);
    if (!plan.global_updates.empty()) {
      std::vector<int> idx;
      Eigen::MatrixXd weights(1, static_cast<long>(plan.global_updates.size()));
      idx.reserve(plan.global_updates.size());
      for (size_t i = 0; i < plan.global_updates.size(); ++i) {
        idx.push_back(plan.global_updates[i].first);
        weights(0, static_cast<long>(i)) = plan.global_updates[i].second;
      }
      const ad::Var endpoints = tape.gather_rows(z_top, idx);
      const ad::Var u = tape.matmul(tape.constant(std::move(weights)), endpoints);
      const ad::Var contrib = tape.smul(theta_d_v, u);
      if (opts.zg_running_sum) {
        zg_out = tape.add(zg_in, contrib);
      } else {
        const double n0 = plan.zg_prefix_weight;
        const double m = static_cast<double>(plan.global_updates.size());
        zg_out = tape.scale(tape.add(tape.scale(zg_in, n0), contrib), 1.0 / (n0 + m));
        zg_weight_out = n0 + m;
      }
      for (size_t i = 0; i < plan.global_updates.size(); ++i) {
        note("global_update", static_cast<int>(i));
      }
    } else {
      zg_out = zg_in;
    }
    zg_used = opts.freeze_global ? zg_in : zg_out;
    zg_out_value = tape.value(zg_out);
  }

  // Scored rows: endpoint representations, enhanced under global arms.
  ad::Var rep_a, rep_b;
  if (use_gnn) {
    std::vector<int> a_idx, b_idx;
    std::vector<double> a_w, b_w;
    a_idx.reserve(plan.scored.size());
    b_idx.reserve(plan.scored.size());
    for (const auto& row : plan.scored) {
      a_idx.push_back(row.a_inst);
      b_idx.push_back(row.b_inst);
      a_w.push_back(row.inv_dyn_a);
      b_w.push_back(row.inv_dyn_b);
    }
    rep_a = tape.gather_rows(z_top, a_idx);
    rep_b = tape.gather_rows(z_top, b_idx);
    if (use_global) {
      rep_a = tape.add_scaled_outer(rep_a, std::move(a_w), theta_d_v, zg_used);
      rep_b = tape.add_scaled_outer(rep_b, std::move(b_w), theta_d_v, zg_used);
      for (size_t r = 0; r < plan.scored.size(); ++r) {
        note("enhance", static_cast<int>(r));
      }
    }
  }

  // FiLM-modulated global parameter (Eq. 8-10), one row per scored pair.
  ad::Var alpha_m, beta_m, omega_m;
  if (use_global) {
    const ad::Var h = tape.concat_cols(rep_a, rep_b);
    alpha_m = tape.sigmoid(tape.add_rowvec(tape.matmul(h, w_alpha_v), b_alpha_v));
    beta_m = tape.sigmoid(tape.add_rowvec(tape.matmul(h, w_beta_v), b_beta_v));
    omega_m = tape.add(tape.mul_rowvec(tape.add_const(alpha_m, 1.0), theta_l_v),
                       beta_m);
    for (size_t r = 0; r < plan.scored.size(); ++r) {
      note("film", static_cast<int>(r));
    }
  }

  // Structural intensity rows (Eq. 5).
  ad::Var lambda_s_vec, lambda_s_scalar;
  if (use_gnn) {
    const ad::Var d = tape.sub(rep_a, rep_b);
    ad::Var v = tape.neg_sq(d);
    if (use_global) v = tape.hadamard(v, omega_m);
    lambda_s_vec = v;
    lambda_s_scalar = tape.row_sum(v);
    if (opts.mean_reduction) {
      lambda_s_scalar =
          tape.scale(lambda_s_scalar, 1.0 / static_cast<double>(plan.dim));
    }
    for (size_t r = 0; r < plan.scored.size(); ++r) {
      note("lambda_s", static_cast<int>(r));
    }
  }

  // Temporal intensity (Eq. 1-2).
  std::vector<HawkesVars> hawkes_vars;
  if (need_hawkes) {
    hawkes_vars.reserve(plan.hawkes_pairs.size());
    for (const auto& hp : plan.hawkes_pairs) {
      hawkes_vars.push_back(build_hawkes_pair(tape, hp, z0, delta_v,
                                              opts.mean_reduction, plan.dim));
    }
    for (size_t i = 0; i < plan.hawkes_pairs.size(); ++i) {
      note("lambda_t", static_cast<int>(i));
    }
  }

  const int n_pos = plan.n_pos;
  const int q = plan.n_negs_per_pair;
  const auto pos_range = [&] {
    std::vector<int> v(static_cast<size_t>(n_pos));
    for (int i = 0; i < n_pos; ++i) v[static_cast<size_t>(i)] = i;
    return v;
  }();

  // Task loss (Eq. 11), mean over pairs.
  ad::Var task_v;
  {
    ad::Var pos_col, neg_col;
    if (task_on_hawkes) {
      std::vector<ad::Var> pos_scalars, neg_scalars;
      for (int p = 0; p < n_pos; ++p) {
        pos_scalars.push_back(
            hawkes_vars[static_cast<size_t>(plan.scored[static_cast<size_t>(p)].hawkes)].scalar);
      }
      for (size_t r = static_cast<size_t>(n_pos); r < plan.scored.size(); ++r) {
        neg_scalars.push_back(
            hawkes_vars[static_cast<size_t>(plan.scored[r].hawkes)].scalar);
      }
      pos_col = tape.stack_scalars(pos_scalars);
      neg_col = tape.stack_scalars(neg_scalars);
    } else {
      std::vector<int> neg_range(plan.scored.size() - static_cast<size_t>(n_pos));
      for (size_t i = 0; i < neg_range.size(); ++i) {
        neg_range[i] = n_pos + static_cast<int>(i);
      }
      pos_col = tape.gather_rows(lambda_s_scalar, pos_range);
      neg_col = tape.gather_rows(lambda_s_scalar, neg_range);
    }
    // -log sigma(pos) == softplus(-pos)
    const ad::Var pos_loss = tape.softplus(tape.scale(pos_col, -1.0));
    // paper form: -log sigma(1 - neg) == softplus(neg - 1)
    const ad::Var neg_arg = opts.neg_form == NegForm::Paper
                                ? tape.add_const(neg_col, -1.0)
                                : neg_col;
    const ad::Var neg_loss = tape.softplus(neg_arg);
    // Sum each pair's Q negatives.
    std::vector<std::vector<std::pair<int, double>>> neg_groups(
        static_cast<size_t>(n_pos));
    for (int p = 0; p < n_pos; ++p) {
      for (int k = 0; k < q; ++k) {
        neg_groups[static_cast<size_t>(p)].emplace_back(p * q + k, 1.0);
      }
    }
    const ad::Var neg_sum = tape.wsum_rows(neg_loss, std::move(neg_groups));
    task_v = tape.mean(tape.add(pos_loss, neg_sum));
  }

  // Alignment loss (Eq. 12) over positive pairs.
  ad::Var align_v = tape.scalar(0.0);
  if (use_align) {
    std::vector<ad::Var> per_pair;
    per_pair.reserve(static_cast<size_t>(n_pos));
    for (int p = 0; p < n_pos; ++p) {
      const auto& row = plan.scored[static_cast<size_t>(p)];
      const ad::Var lt = hawkes_vars[static_cast<size_t>(row.hawkes)].vec;
      const ad::Var ls = tape.gather_rows(lambda_s_vec, {p});
      per_pair.push_back(tape.smooth_l1_row_mean(lt, ls));
    }
    align_v = tape.mean(tape.stack_scalars(per_pair));
  }

  // Global loss (Eq. 13) over positive pairs.
  ad::Var global_v = tape.scalar(0.0);
  if (use_lg) {
    std::vector<ad::Var> per_pair;
    per_pair.reserve(static_cast<size_t>(n_pos));
    const ad::Var pos_a = tape.gather_rows(rep_a, pos_range);
    const ad::Var pos_b = tape.gather_rows(rep_b, pos_range);
    const ad::Var da = tape.sub_rowvec(pos_a, zg_used);
    const ad::Var db = tape.sub_rowvec(pos_b, zg_used);
    // row_sum(neg_sq(.)) is -(squared norm); negate and dimension-average.
    const double inv_d = 1.0 / static_cast<double>(plan.dim);
    const ad::Var sq =
        tape.scale(tape.add(tape.row_sum(tape.neg_sq(da)),
                            tape.row_sum(tape.neg_sq(db))),
                   -inv_d);
    ad::Var nll = tape.softplus(sq);
    if (opts.lg_mode == GlobalLossMode::Literal) nll = tape.scale(nll, -1.0);
    const ad::Var alpha_pos = tape.gather_rows(alpha_m, pos_range);
    const ad::Var beta_pos = tape.gather_rows(beta_m, pos_range);
    const ad::Var reg =
        tape.scale(tape.add(tape.row_sum(tape.neg_sq(alpha_pos)),
                            tape.row_sum(tape.neg_sq(beta_pos))),
                   -inv_d);
    global_v = tape.mean(tape.add(nll, reg));
  }

  // Total (Eq. 14).
  ad::Var eta1_v, eta2_v, rho1_v, rho2_v;
  if (params.learn_etas) {
    rho1_v = tape.scalar(params.rho1, want_grads);
    rho2_v = tape.scalar(params.rho2, want_grads);
    eta1_v = tape.softplus(rho1_v);
    eta2_v = tape.softplus(rho2_v);
  } else {
    eta1_v = tape.scalar(params.eta1);
    eta2_v = tape.scalar(params.eta2);
  }
  const ad::Var total_v =
      tape.add(task_v, tape.add(tape.smul(eta1_v, align_v),
                                tape.smul(eta2_v, global_v)));

  PlanEvalResult result;
  result.breakdown =
      total_loss(tape.scalar_value(task_v), tape.scalar_value(align_v),
                 tape.scalar_value(global_v), tape.scalar_value(eta1_v),
                 tape.scalar_value(eta2_v));
  result.z_g_out = zg_out_value;
  result.z_g_weight_out = zg_weight_out;
  ad::Var selected_v = total_v;
  switch (opts.which) {
    case WhichLoss::Task: selected_v = task_v; break;
    case WhichLoss::Align: selected_v = align_v; break;
    case WhichLoss::Global: selected_v = global_v; break;
    case WhichLoss::Total: selected_v = total_v; break;
  }
  result.selected = tape.scalar_value(selected_v);

  if (want_grads) {
    tape.backward(selected_v);
    grads_out->set_zero();
    grads_out->by_name(params.features ? "W0" : "embed") = tape.grad(w0);
    if (use_gnn) {
      for (int l = 0; l < params.layers; ++l) {
        grads_out->by_name("W_S^" + std::to_string(l + 1)) =
            tape.grad(w_self[static_cast<size_t>(l)]);
        grads_out->by_name("W_N^" + std::to_string(l + 1)) =
            tape.grad(w_nbr[static_cast<size_t>(l)]);
      }
    }
    if (need_hawkes) grads_out->by_name("delta_t") = tape.grad(delta_v);
    if (use_global) {
      grads_out->by_name("theta_d") = tape.grad(theta_d_v);
      grads_out->by_name("theta_l") = tape.grad(theta_l_v);
      grads_out->by_name("W_alpha") = tape.grad(w_alpha_v);
      grads_out->by_name("b_alpha") = tape.grad(b_alpha_v);
      grads_out->by_name("W_beta") = tape.grad(w_beta_v);
      grads_out->by_name("b_beta") = tape.grad(b_beta_v);
    }
    if (params.learn_etas) {
      grads_out->by_name("rho1") = tape.grad(rho1_v);
      grads_out->by_name("rho2") = tape.grad(rho2_v);
    }
  }
  return result;
}

}  // namespace s2t
