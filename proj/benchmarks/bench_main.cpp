#include <benchmark/benchmark.h>

#include <sstream>

#include "s2t/graph.hpp"
#include "s2t/plan.hpp"
#include "s2t/structural.hpp"
#include "s2t/synth.hpp"
#include "s2t/temporal.hpp"

using namespace s2t;

namespace {

struct BenchState {
  TemporalGraph g;
  ModelParams params;
  SequenceStore store;
  NegativeSampler sampler;
  GlobalState gstate;

  BenchState(int nodes, long events, int dim, int seq_len, int layers)
      : g(synth_graph({.num_nodes = nodes,
                       .num_interactions = events,
                       .communities = 16,
                       .seed = 99})),
        params(init_params(nodes, 0, dim, layers, 1)),
        store(g.num_nodes, seq_len),
        sampler(g.degrees(), 1.0, 2),
        gstate(GlobalState::zeros(dim)) {
    // warm history: replay half the stream
    for (size_t i = 0; i < g.interactions.size() / 2; ++i) {
      store.apply(g.interactions[i]);
    }
  }
};

}  // namespace

static void BM_ParseEdgeList(benchmark::State& state) {
  const auto g = synth_graph({.num_nodes = 500, .num_interactions = 20000, .seed = 5});
  std::ostringstream os;
  for (const auto& e : g.interactions) {
    os << e.src << ' ' << e.dst << ' ' << e.time << '\n';
  }
  const std::string text = os.str();
  for (auto _ : state) {
    std::istringstream in(text);
    benchmark::DoNotOptimize(parse_edge_list(in));
  }
  state.SetItemsProcessed(state.iterations() * 20000);
}
BENCHMARK(BM_ParseEdgeList);

static void BM_TemporalIntensity(benchmark::State& state) {
  BenchState bs(500, 20000, static_cast<int>(state.range(0)), 10, 2);
  NodeId x = bs.g.interactions.back().src;
  NodeId y = bs.g.interactions.back().dst;
  for (auto _ : state) {
    benchmark::DoNotOptimize(temporal_intensity(x, y, 0.99, bs.store, bs.params));
  }
}
BENCHMARK(BM_TemporalIntensity)->Arg(32)->Arg(128);

static void BM_NodeRepresentation(benchmark::State& state) {
  BenchState bs(500, 20000, static_cast<int>(state.range(0)), 10, 2);
  NodeId x = bs.g.interactions.back().src;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        node_representation(x, 0.99, bs.params.layers, bs.store, bs.params));
  }
}
BENCHMARK(BM_NodeRepresentation)->Arg(32)->Arg(128);

static void BM_BatchStep(benchmark::State& state) {
  BenchState bs(500, 20000, static_cast<int>(state.range(0)), 10, 2);
  const auto batches = make_batches(bs.g, 128);
  PlanOptions popts;
  EvalOptions eopts;
  GradBundle grads = GradBundle::zeros_like(bs.params);
  size_t bi = batches.size() / 2;
  for (auto _ : state) {
    SequenceStore store_copy = bs.store;
    auto plan = collect_batch_plan(store_copy, batches[bi], bs.sampler,
                                   bs.gstate, bs.params, popts, 1, 0);
    benchmark::DoNotOptimize(evaluate_plan(plan, bs.params, eopts, &grads));
  }
  state.SetItemsProcessed(state.iterations() * 128);
}
BENCHMARK(BM_BatchStep)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
