#pragma once

#include <cstdint>
#include <string>

#include "s2t/graph.hpp"

namespace s2t {

// Seeded generator for temporal interaction streams with community
// structure, a long-tail activity distribution (zipf-like), and
// repeat-interaction bursts. Used by tests, benchmarks, and the synth CLI
// subcommand.
struct SynthConfig {
  int num_nodes = 500;
  long num_interactions = 10000;
  int communities = 20;
  double intra_prob = 0.9;    // chance a fresh edge stays inside a community
  double repeat_prob = 0.5;   // chance to re-emit a recently seen edge
  double activity_power = 0.85;  // zipf exponent for node activity
  std::uint64_t seed = 7;
};

TemporalGraph synth_graph(const SynthConfig& cfg);

// Writes the stream as a `src dst timestamp` edge list.
void write_edge_list(const TemporalGraph& g, const std::string& path);

// A CollegeMsg-sized stand-in: 1,899 nodes, 59,835 interactions, heavy
// long-tail degree mix. Deterministic for a given seed.
SynthConfig collegemsg_like_config(std::uint64_t seed = 20230);

}  // namespace s2t
