#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>

#include "s2t/checkpoint.hpp"
#include "s2t/eval.hpp"
#include "s2t/model_gradcheck.hpp"
#include "s2t/synth.hpp"
#include "s2t/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace s2t;

namespace {

struct CommonOpts {
  std::string data;
  std::string out_dir = "out";
  std::string save_path;
  RunConfig run;
  bool no_time_norm = false;
  std::string mode_str = "full";
  std::string neg_form = "paper";
  std::string gnn_act = "sigmoid";
  std::string feature = "product";
  bool lg_literal = false;
  std::uint64_t eval_seed = 0;  // defaults to run seed
};

void add_common_flags(CLI::App* cmd, CommonOpts& o, bool needs_data = true) {
  auto* data = cmd->add_option("--data", o.data, "edge list `src dst timestamp`");
  if (needs_data) data->required();
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--train-frac", o.run.train_frac, "chronological train fraction");
  cmd->add_option("--batch-size,-b", o.run.batch_size, "batch size");
  cmd->add_option("--seq-len,-S", o.run.seq_len, "historical neighbor sequence length");
  cmd->add_option("--dim,-d", o.run.dim, "representation dimension");
  cmd->add_option("--layers,-l", o.run.layers, "GNN layer count");
  cmd->add_option("--negatives,-Q", o.run.negatives, "negative samples per pair");
  cmd->add_option("--lr", o.run.lr, "Adam learning rate");
  cmd->add_option("--epochs", o.run.epochs, "max training epochs");
  cmd->add_option("--seed", o.run.seed, "RNG seed");
  cmd->add_option("--mode", o.mode_str,
                  "ablation arm: hawkes|gnn|gnn_global|gnn_hawkes|full");
  cmd->add_option("--neg-power", o.run.neg_power, "degree power for negative sampling");
  cmd->add_flag("--no-time-norm", o.no_time_norm, "keep raw timestamps");
  cmd->add_flag("--learn-etas", o.run.learn_etas,
                "treat eta1/eta2 as learnable (softplus-reparameterized)");
  cmd->add_option("--eta1", o.run.eta1, "alignment loss weight");
  cmd->add_option("--eta2", o.run.eta2, "global loss weight");
  cmd->add_flag("--lg-literal", o.lg_literal,
                "use the literal (+log sigma) form of the global loss");
  cmd->add_option("--neg-form", o.neg_form, "task-loss negative form: paper|conventional");
  cmd->add_option("--gnn-act", o.gnn_act, "GNN activation: sigmoid|tanh|relu");
  cmd->add_flag("--global-freeze-batch", o.run.freeze_global_in_batch,
                "freeze z_g at batch start for enhancement/losses");
  cmd->add_flag("--zg-carry", o.run.carry_global_across_epochs,
                "carry z_g across epoch replays instead of re-zeroing");
  cmd->add_flag("--zg-sum", o.run.zg_running_sum,
                "keep z_g as the literal Eq.-6 running sum (no mean normalization)");
  cmd->add_flag("--mean-reduction", o.run.mean_reduction,
                "reduce intensity vectors by mean instead of sum");
  cmd->add_option("--feat", o.feature, "pair feature: product|absdiff|concat");
  cmd->add_option("--eval-seed", o.eval_seed, "seed for evaluation sampling");
}

void finalize(CommonOpts& o) {
  o.run.mode = mode_from_string(o.mode_str);
  if (o.neg_form == "paper") {
    o.run.neg_form = NegForm::Paper;
  } else if (o.neg_form == "conventional") {
    o.run.neg_form = NegForm::Conventional;
  } else {
    throw CLI::ValidationError("--neg-form must be paper|conventional");
  }
  if (o.gnn_act == "sigmoid") {
    o.run.gnn_act = ad::Act::Sigmoid;
  } else if (o.gnn_act == "tanh") {
    o.run.gnn_act = ad::Act::Tanh;
  } else if (o.gnn_act == "relu") {
    o.run.gnn_act = ad::Act::Relu;
  } else {
    throw CLI::ValidationError("--gnn-act must be sigmoid|tanh|relu");
  }
  o.run.lg_mode = o.lg_literal ? GlobalLossMode::Literal : GlobalLossMode::Intent;
  if (o.eval_seed == 0) o.eval_seed = o.run.seed;
}

PairFeature feature_from(const std::string& s) {
  if (s == "product") return PairFeature::Product;
  if (s == "absdiff") return PairFeature::AbsDiff;
  if (s == "concat") return PairFeature::Concat;
  throw CLI::ValidationError("--feat must be product|absdiff|concat");
}

json config_json(const CommonOpts& o) {
  return json{{"data", o.data},
              {"dim", o.run.dim},
              {"batch_size", o.run.batch_size},
              {"negatives", o.run.negatives},
              {"seq_len", o.run.seq_len},
              {"layers", o.run.layers},
              {"lr", o.run.lr},
              {"epochs", o.run.epochs},
              {"train_frac", o.run.train_frac},
              {"seed", o.run.seed},
              {"mode", o.mode_str},
              {"neg_power", o.run.neg_power},
              {"learn_etas", o.run.learn_etas},
              {"eta1", o.run.eta1},
              {"eta2", o.run.eta2},
              {"lg_literal", o.lg_literal},
              {"neg_form", o.neg_form},
              {"gnn_act", o.gnn_act},
              {"global_freeze_batch", o.run.freeze_global_in_batch},
              {"zg_carry", o.run.carry_global_across_epochs},
              {"zg_sum", o.run.zg_running_sum},
              {"mean_reduction", o.run.mean_reduction},
              {"no_time_norm", o.no_time_norm},
              {"feature", o.feature}};
}

void write_loss_csv(const fs::path& path, const std::vector<LossRecord>& trace) {
  std::ofstream f(path);
  f << "epoch,batch,task,align,global,total\n";
  f << std::setprecision(12);
  for (const auto& r : trace) {
    f << r.epoch << ',' << r.batch << ',' << r.loss.task << ',' << r.loss.align
      << ',' << r.loss.global_ << ',' << r.loss.total << '\n';
  }
}

json report_json(const EvalReport& r) {
  return json{{"accuracy", r.accuracy}, {"f1", r.f1},      {"n_pos", r.n_pos},
              {"n_neg", r.n_neg},       {"seed", r.seed},  {"wall_time", r.wall_time}};
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream f(path);
  f << j.dump(2) << '\n';
}

EvalReport run_eval(const CommonOpts& o, const TrainResult& tr,
                    const TemporalGraph& train_g,
                    const std::vector<Interaction>& test, std::uint64_t seed) {
  EvalConfig ecfg;
  ecfg.feature = feature_from(o.feature);
  ecfg.seed = seed;
  ecfg.gnn_act = o.run.gnn_act;
  return evaluate_link_prediction(tr.params, tr.global_state, tr.store, train_g,
                                  test, o.run.mode, ecfg);
}

int cmd_train(CommonOpts& o) {
  finalize(o);
  fs::create_directories(o.out_dir);
  const auto g = parse_edge_list_file(o.data, {.normalize_time = !o.no_time_norm});
  if (g.self_loop_count > 0) {
    std::cerr << "warning: " << g.self_loop_count << " self-loop interaction(s)\n";
  }
  const auto [train_g, test] = chronological_split(g, o.run.train_frac);
  std::cout << "loaded " << g.num_nodes << " nodes, " << g.interactions.size()
            << " interactions (" << train_g.interactions.size() << " train / "
            << test.size() << " test)\n";

  const auto tr = train(o.run, train_g);
  std::cout << "trained " << tr.epochs_run << " epoch(s) in " << std::fixed
            << std::setprecision(1) << tr.wall_seconds << "s; final epoch mean loss "
            << std::setprecision(6)
            << (tr.epoch_mean_total.empty() ? 0.0 : tr.epoch_mean_total.back())
            << "\n";

  write_loss_csv(fs::path(o.out_dir) / "loss.csv", tr.trace);

  Checkpoint ck;
  ck.params = tr.params;
  ck.global_state = tr.global_state;
  ck.adam = AdamState::init(ck.params, o.run.lr);  // shapes only; moments not reused
  ck.config_json = config_json(o).dump();
  const auto ckpt_path =
      o.save_path.empty() ? (fs::path(o.out_dir) / "checkpoint.bin").string()
                          : o.save_path;
  save_checkpoint(ckpt_path, ck);

  EvalReport rep;
  if (!test.empty()) {
    rep = run_eval(o, tr, train_g, test, o.eval_seed);
    write_json(fs::path(o.out_dir) / "metrics.json", report_json(rep));
    std::cout << "link prediction: ACC " << std::setprecision(4) << 100.0 * rep.accuracy
              << "  F1 " << 100.0 * rep.f1 << "  (" << rep.n_pos << "+, "
              << rep.n_neg << "-)\n";
  }
  std::cout << "wrote " << ckpt_path << ", " << o.out_dir << "/loss.csv, "
            << o.out_dir << "/metrics.json\n";
  return 0;
}

int cmd_eval(CommonOpts& o, const std::string& load_path) {
  finalize(o);
  fs::create_directories(o.out_dir);
  auto ck = load_checkpoint(load_path);
  const auto cfg = json::parse(ck.config_json);
  // The checkpoint's config echo wins for everything that shapes the model.
  o.run.seq_len = cfg.value("seq_len", o.run.seq_len);
  o.run.train_frac = cfg.value("train_frac", o.run.train_frac);
  o.mode_str = cfg.value("mode", o.mode_str);
  o.run.mode = mode_from_string(o.mode_str);
  o.no_time_norm = cfg.value("no_time_norm", o.no_time_norm);

  const auto g = parse_edge_list_file(o.data, {.normalize_time = !o.no_time_norm});
  const auto [train_g, test] = chronological_split(g, o.run.train_frac);
  if (g.num_nodes != ck.params.num_nodes) {
    throw std::runtime_error("eval: node count mismatch vs checkpoint");
  }

  TrainResult tr{std::move(ck.params), std::move(ck.global_state),
                 SequenceStore(g.num_nodes, o.run.seq_len)};
  for (const auto& e : train_g.interactions) tr.store.apply(e);

  const auto rep = run_eval(o, tr, train_g, test, o.eval_seed);
  write_json(fs::path(o.out_dir) / "metrics.json", report_json(rep));
  std::cout << "ACC " << std::setprecision(4) << 100.0 * rep.accuracy << "  F1 "
            << 100.0 * rep.f1 << "  (" << rep.n_pos << "+, " << rep.n_neg << "-)\n";
  return 0;
}

int cmd_ablate(CommonOpts& o) {
  finalize(o);
  fs::create_directories(o.out_dir);
  const auto g = parse_edge_list_file(o.data, {.normalize_time = !o.no_time_norm});
  const auto [train_g, test] = chronological_split(g, o.run.train_frac);

  json rows = json::array();
  std::cout << "mode          ACC      F1\n";
  for (const auto mode : {AblationMode::Hawkes, AblationMode::Gnn,
                          AblationMode::GnnGlobal, AblationMode::GnnHawkes,
                          AblationMode::Full}) {
    auto run = o;
    run.run.mode = mode;
    const auto tr = train(run.run, train_g);
    const auto rep = run_eval(run, tr, train_g, test, o.eval_seed);
    rows.push_back({{"mode", mode_to_string(mode)},
                    {"report", report_json(rep)},
                    {"epochs_run", tr.epochs_run}});
    std::cout << std::left << std::setw(12) << mode_to_string(mode) << "  "
              << std::fixed << std::setprecision(2) << 100.0 * rep.accuracy
              << "    " << 100.0 * rep.f1 << "\n";
  }
  write_json(fs::path(o.out_dir) / "ablation.json", rows);
  return 0;
}

int cmd_sweep(CommonOpts& o, const std::string& param) {
  finalize(o);
  fs::create_directories(o.out_dir);
  std::vector<int> values;
  if (param == "S") {
    values = {5, 10, 15, 20, 25};
  } else if (param == "Q") {
    values = {1, 2, 3, 4, 5};
  } else {
    throw CLI::ValidationError("--param must be S or Q");
  }
  const auto g = parse_edge_list_file(o.data, {.normalize_time = !o.no_time_norm});
  const auto [train_g, test] = chronological_split(g, o.run.train_frac);

  json rows = json::array();
  std::cout << param << "    ACC      F1\n";
  for (int v : values) {
    auto run = o;
    if (param == "S") {
      run.run.seq_len = v;
    } else {
      run.run.negatives = v;
    }
    const auto tr = train(run.run, train_g);
    const auto rep = run_eval(run, tr, train_g, test, o.eval_seed);
    rows.push_back({{"param", param},
                    {"value", v},
                    {"report", report_json(rep)}});
    std::cout << std::left << std::setw(4) << v << " " << std::fixed
              << std::setprecision(2) << 100.0 * rep.accuracy << "    "
              << 100.0 * rep.f1 << "\n";
  }
  write_json(fs::path(o.out_dir) / ("sweep_" + param + ".json"), rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"S2T temporal graph representation learning"};
  app.require_subcommand(1);

  CommonOpts train_opts;
  auto* train_cmd = app.add_subcommand("train", "train a model and evaluate it");
  add_common_flags(train_cmd, train_opts);
  train_cmd->add_option("--save", train_opts.save_path, "checkpoint path");

  CommonOpts eval_opts;
  std::string load_path;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a saved checkpoint");
  add_common_flags(eval_cmd, eval_opts);
  eval_cmd->add_option("--load", load_path, "checkpoint path")->required();

  CommonOpts ablate_opts;
  auto* ablate_cmd =
      app.add_subcommand("ablate", "run all five module-combination arms");
  add_common_flags(ablate_cmd, ablate_opts);

  CommonOpts sweep_opts;
  std::string sweep_param = "S";
  auto* sweep_cmd = app.add_subcommand("sweep", "sensitivity sweep over S or Q");
  add_common_flags(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--param", sweep_param, "S or Q")->required();

  ModelGradcheckConfig gc;
  std::string gc_mode = "full";
  auto* gc_cmd = app.add_subcommand(
      "gradcheck", "finite-difference verification of all loss gradients");
  gc_cmd->add_option("--dim,-d", gc.dim, "representation dimension");
  gc_cmd->add_option("--seq-len,-S", gc.seq_len, "sequence length");
  gc_cmd->add_option("--layers,-l", gc.layers, "GNN layers");
  gc_cmd->add_option("--batches", gc.n_batches, "number of batches to check");
  gc_cmd->add_option("--batch-size,-b", gc.batch_size, "pairs per batch");
  gc_cmd->add_option("--nodes", gc.num_nodes, "synthetic node count");
  gc_cmd->add_option("--eps", gc.eps, "central-difference step");
  gc_cmd->add_option("--tol", gc.tolerance, "max relative error tolerance");
  gc_cmd->add_option("--seed", gc.seed, "RNG seed");
  gc_cmd->add_option("--mode", gc_mode, "ablation arm");
  gc_cmd->add_flag("--learn-etas", gc.learn_etas, "include eta reparameterization");

  SynthConfig synth;
  std::string synth_out = "synthetic.txt";
  bool synth_collegemsg = false;
  auto* synth_cmd =
      app.add_subcommand("synth", "generate a synthetic temporal edge list");
  synth_cmd->add_option("--nodes", synth.num_nodes, "node count");
  synth_cmd->add_option("--events", synth.num_interactions, "interaction count");
  synth_cmd->add_option("--communities", synth.communities, "community count");
  synth_cmd->add_option("--intra", synth.intra_prob, "intra-community probability");
  synth_cmd->add_option("--repeat", synth.repeat_prob, "edge repeat probability");
  synth_cmd->add_option("--power", synth.activity_power, "activity zipf exponent");
  synth_cmd->add_option("--seed", synth.seed, "RNG seed");
  synth_cmd->add_option("--out-file", synth_out, "output edge list path");
  synth_cmd->add_flag("--collegemsg-like", synth_collegemsg,
                      "use the CollegeMsg-sized preset");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) return cmd_train(train_opts);
    if (eval_cmd->parsed()) return cmd_eval(eval_opts, load_path);
    if (ablate_cmd->parsed()) return cmd_ablate(ablate_opts);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_opts, sweep_param);
    if (gc_cmd->parsed()) {
      gc.mode = mode_from_string(gc_mode);
      const auto result = run_model_gradcheck(gc);
      std::cout << result.summary();
      return result.pass ? 0 : 1;
    }
    if (synth_cmd->parsed()) {
      if (synth_collegemsg) {
        const auto preset = collegemsg_like_config(synth.seed);
        synth = preset;
      }
      const auto g = synth_graph(synth);
      write_edge_list(g, synth_out);
      std::cout << "wrote " << synth_out << ": " << g.num_nodes << " nodes, "
                << g.interactions.size() << " interactions\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
