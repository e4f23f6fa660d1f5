#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

#include "s2t/graph.hpp"
#include "s2t/params.hpp"
#include "s2t/rng.hpp"
#include "s2t/synth.hpp"

namespace testutil {

inline s2t::ModelParams random_params(int num_nodes, int dim, int layers,
                                      std::uint64_t seed,
                                      bool learn_etas = false) {
  auto p = s2t::init_params(num_nodes, 0, dim, layers, seed, learn_etas);
  // Perturb the structured defaults so tests do not sit on special values.
  s2t::Rng rng(seed ^ 0xabcdef);
  p.delta_t = rng.uniform(0.2, 2.0);
  p.theta_d = rng.uniform(0.05, 0.3);
  for (long i = 0; i < p.theta_l.cols(); ++i) p.theta_l(i) = rng.uniform(0.5, 1.5);
  for (long i = 0; i < p.b_alpha.cols(); ++i) p.b_alpha(i) = rng.uniform(-0.2, 0.2);
  for (long i = 0; i < p.b_beta.cols(); ++i) p.b_beta(i) = rng.uniform(-0.2, 0.2);
  return p;
}

// A store pre-filled with a deterministic random interaction prefix whose
// times stay below `horizon`.
inline s2t::SequenceStore random_store(int num_nodes, int seq_len, int events,
                                       double horizon, std::uint64_t seed) {
  s2t::SequenceStore store(static_cast<s2t::NodeId>(num_nodes), seq_len);
  s2t::Rng rng(seed);
  double t = 0.0;
  for (int i = 0; i < events; ++i) {
    t += rng.uniform(0.0, horizon / (events + 1.0) * 2.0 / 1.5);
    if (t >= horizon) t = horizon * (1.0 - 1e-9);
    auto a = static_cast<s2t::NodeId>(rng.uniform_index(num_nodes));
    auto b = static_cast<s2t::NodeId>(rng.uniform_index(num_nodes));
    if (a == b) b = static_cast<s2t::NodeId>((b + 1) % num_nodes);
    store.apply(s2t::Interaction{a, b, t});
  }
  return store;
}

// CollegeMsg location: the real SNAP file when S2T_COLLEGEMSG points at it,
// otherwise a cached synthetic stand-in with the same node and interaction
// counts.
inline std::string collegemsg_path() {
  if (const char* env = std::getenv("S2T_COLLEGEMSG")) {
    if (std::filesystem::exists(env)) return env;
  }
  const auto cached = std::filesystem::temp_directory_path() / "s2t_collegemsg_like.txt";
  if (!std::filesystem::exists(cached)) {
    const auto g = s2t::synth_graph(s2t::collegemsg_like_config());
    s2t::write_edge_list(g, cached.string());
  }
  return cached.string();
}

}  // namespace testutil
