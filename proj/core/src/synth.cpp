#include "s2t/synth.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "s2t/rng.hpp"

namespace s2t {

namespace {

// Sampler over weights w_i, by inverse CDF.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(const std::vector<double>& weights) {
    cum_.resize(weights.size());
    double total = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) {
      total += weights[i];
      cum_[i] = total;
    }
    for (double& c : cum_) c /= total;
    cum_.back() = 1.0;
  }

  int draw(Rng& rng) const {
    const double u = rng.uniform();
    return static_cast<int>(
        std::distance(cum_.begin(), std::upper_bound(cum_.begin(), cum_.end(), u)));
  }

 private:
  std::vector<double> cum_;
};

}  // namespace

TemporalGraph synth_graph(const SynthConfig& cfg) {
  if (cfg.num_nodes < 2 || cfg.num_interactions < cfg.num_nodes) {
    throw std::invalid_argument("synth_graph: need >= 2 nodes and at least one interaction per node");
  }
  Rng rng(cfg.seed);

  // Random community assignment; zipf-ish activity over a shuffled node order
  // so the hubs are spread across communities.
  std::vector<int> community(static_cast<size_t>(cfg.num_nodes));
  std::vector<int> order(static_cast<size_t>(cfg.num_nodes));
  std::iota(order.begin(), order.end(), 0);
  for (size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.uniform_index(i)]);
  }
  for (size_t i = 0; i < community.size(); ++i) {
    community[i] = static_cast<int>(rng.uniform_index(
        static_cast<std::uint64_t>(cfg.communities)));
  }
  std::vector<double> activity(static_cast<size_t>(cfg.num_nodes));
  for (size_t rank = 0; rank < order.size(); ++rank) {
    activity[static_cast<size_t>(order[rank])] =
        1.0 / std::pow(static_cast<double>(rank + 1), cfg.activity_power);
  }
  DiscreteSampler node_sampler(activity);

  // Per-community activity-weighted member lists.
  std::vector<std::vector<int>> members(static_cast<size_t>(cfg.communities));
  for (int v = 0; v < cfg.num_nodes; ++v) {
    members[static_cast<size_t>(community[static_cast<size_t>(v)])].push_back(v);
  }
  std::vector<DiscreteSampler> member_samplers;
  member_samplers.reserve(members.size());
  for (const auto& m : members) {
    std::vector<double> w;
    w.reserve(m.size());
    for (int v : m) w.push_back(activity[static_cast<size_t>(v)]);
    if (w.empty()) w.push_back(1.0);
    member_samplers.emplace_back(w);
  }

  TemporalGraph g;
  g.num_nodes = cfg.num_nodes;
  g.interactions.reserve(static_cast<size_t>(cfg.num_interactions));

  std::deque<std::pair<NodeId, NodeId>> recent;
  const size_t recent_cap = 512;
  double t = 0.0;

  auto pick_partner = [&](NodeId src) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      NodeId dst;
      if (rng.uniform() < cfg.intra_prob) {
        const auto c = static_cast<size_t>(community[static_cast<size_t>(src)]);
        if (members[c].size() < 2) continue;
        dst = static_cast<NodeId>(members[c][static_cast<size_t>(
            member_samplers[c].draw(rng))]);
      } else {
        dst = static_cast<NodeId>(node_sampler.draw(rng));
      }
      if (dst != src) return dst;
    }
    return static_cast<NodeId>((src + 1) % cfg.num_nodes);
  };

  auto emit = [&](NodeId src, NodeId dst) {
    t += -std::log(1.0 - rng.uniform());  // exponential gaps
    g.interactions.push_back(Interaction{src, dst, t});
    recent.emplace_back(src, dst);
    if (recent.size() > recent_cap) recent.pop_front();
  };

  // Coverage pass: every node id appears at least once, in random order.
  for (int v : order) {
    emit(static_cast<NodeId>(v), pick_partner(static_cast<NodeId>(v)));
  }
  // Main stream: bursts re-emit recent edges, fresh edges follow the
  // community/activity mix.
  while (static_cast<long>(g.interactions.size()) < cfg.num_interactions) {
    if (!recent.empty() && rng.uniform() < cfg.repeat_prob) {
      const auto& [a, b] = recent[rng.uniform_index(recent.size())];
      emit(a, b);
    } else {
      const auto src = static_cast<NodeId>(node_sampler.draw(rng));
      emit(src, pick_partner(src));
    }
  }

  g.raw_time_min = g.interactions.front().time;
  g.raw_time_max = g.interactions.back().time;
  // Normalize like the parser would.
  const double range = g.raw_time_max - g.raw_time_min;
  for (auto& e : g.interactions) {
    e.time = range > 0.0 ? (e.time - g.raw_time_min) / range : 0.0;
  }
  return g;
}

void write_edge_list(const TemporalGraph& g, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_edge_list: cannot open " + path);
  f << "# synthetic temporal edge list: " << g.num_nodes << " nodes, "
    << g.interactions.size() << " interactions\n";
  f.precision(10);
  // Timestamps are written on the raw scale so the parser's normalization
  // round-trips.
  const double range = g.raw_time_max - g.raw_time_min;
  for (const auto& e : g.interactions) {
    const double raw = range > 0.0 ? g.raw_time_min + e.time * range : g.raw_time_min;
    f << e.src << ' ' << e.dst << ' ' << raw << '\n';
  }
}

SynthConfig collegemsg_like_config(std::uint64_t seed) {
  SynthConfig cfg;
  cfg.num_nodes = 1899;
  cfg.num_interactions = 59835;
  cfg.communities = 24;
  cfg.intra_prob = 0.92;
  cfg.repeat_prob = 0.45;
  cfg.activity_power = 0.8;
  cfg.seed = seed;
  return cfg;
}

}  // namespace s2t
