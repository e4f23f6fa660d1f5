#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace s2t {

using NodeId = std::int32_t;

// One timestamped node-pair event. `time` is the normalized timestamp unless
// normalization was disabled at parse time.
struct Interaction {
  NodeId src = 0;
  NodeId dst = 0;
  double time = 0.0;
};

struct TemporalGraph {
  NodeId num_nodes = 0;
  std::vector<Interaction> interactions;  // non-decreasing in time
  double raw_time_min = 0.0;
  double raw_time_max = 0.0;
  std::optional<Eigen::MatrixXd> features;  // num_nodes x F, usually absent
  std::size_t self_loop_count = 0;

  // Interaction count per node over the whole stream (both endpoints;
  // self-loops count once).
  std::vector<std::int64_t> degrees() const;
};

struct ParseOptions {
  bool normalize_time = true;
};

// Parses `src dst timestamp` lines. `#`-prefixed comment lines and blank
// lines are skipped. Timestamps are min-max normalized to [0,1]; a zero time
// range maps everything to 0.0. Throws std::runtime_error naming the line on
// malformed input, and on empty input.
TemporalGraph parse_edge_list(std::istream& in, const ParseOptions& opts = {});
TemporalGraph parse_edge_list_file(const std::string& path,
                                   const ParseOptions& opts = {});

// First floor(train_fraction * n) interactions become the training graph,
// the rest are returned as test interactions. No shuffling.
std::pair<TemporalGraph, std::vector<Interaction>> chronological_split(
    const TemporalGraph& g, double train_fraction);

// Fixed-capacity list of a node's latest interactions, oldest first.
class NeighborSequence {
 public:
  struct Entry {
    NodeId neighbor = 0;
    double time = 0.0;
  };

  NeighborSequence() = default;
  explicit NeighborSequence(int capacity) : capacity_(capacity) {}

  int capacity() const { return capacity_; }
  int valid_count() const { return static_cast<int>(entries_.size()); }
  const Entry& entry(int i) const { return entries_[static_cast<size_t>(i)]; }
  const std::vector<Entry>& entries() const { return entries_; }
  double last_time() const {
    return entries_.empty() ? -std::numeric_limits<double>::infinity()
                            : entries_.back().time;
  }

  // Appends (neighbor, time), evicting the oldest entry when full. The
  // stream is chronological by construction; an out-of-order time throws.
  void record(NodeId neighbor, double time);

  // Entries with time <= horizon, oldest first.
  std::vector<Entry> view(double horizon) const;

 private:
  int capacity_ = 0;
  std::vector<Entry> entries_;
};

// Per-node neighbor sequences plus a per-node event counter used as a
// staleness version by batch-plan memoization.
class SequenceStore {
 public:
  SequenceStore() = default;
  SequenceStore(NodeId num_nodes, int seq_len);

  NodeId num_nodes() const { return static_cast<NodeId>(seqs_.size()); }
  int seq_len() const { return seq_len_; }

  const NeighborSequence& neighbors_at(NodeId node) const;
  std::uint32_t version(NodeId node) const;

  // Records one interaction into both endpoint sequences (once for a
  // self-loop).
  void apply(const Interaction& e);

  void reset();

 private:
  int seq_len_ = 0;
  std::vector<NeighborSequence> seqs_;
  std::vector<std::uint32_t> versions_;
};

struct Batch {
  std::vector<Interaction> pairs;
  // node -> number of interactions involving it inside this batch.
  std::map<NodeId, int> dynamics;
};

// Consecutive chronological chunks of size b (last may be smaller).
std::vector<Batch> make_batches(const TemporalGraph& g, int batch_size);

}  // namespace s2t
