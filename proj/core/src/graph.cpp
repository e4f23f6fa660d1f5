#include "s2t/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace s2t {

std::vector<std::int64_t> TemporalGraph::degrees() const {
  std::vector<std::int64_t> deg(static_cast<size_t>(num_nodes), 0);
  for (const auto& e : interactions) {
    deg[static_cast<size_t>(e.src)]++;
    if (e.dst != e.src) deg[static_cast<size_t>(e.dst)]++;
  }
  return deg;
}

TemporalGraph parse_edge_list(std::istream& in, const ParseOptions& opts) {
  struct RawEdge {
    long long src, dst;
    double time;
  };
  std::vector<RawEdge> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;  // blank
    if (line[first] == '#') continue;          // comment
    std::istringstream ls(line);
    RawEdge e{};
    std::string extra;
    if (!(ls >> e.src >> e.dst >> e.time)) {
      throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                               ": expected `src dst timestamp`, got: " + line);
    }
    if (e.src < 0 || e.dst < 0) {
      throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                               ": negative node id");
    }
    if (!std::isfinite(e.time)) {
      throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                               ": non-finite timestamp");
    }
    raw.push_back(e);
  }
  if (raw.empty()) {
    throw std::runtime_error("parse error: empty edge list");
  }

  std::stable_sort(raw.begin(), raw.end(),
                   [](const RawEdge& a, const RawEdge& b) { return a.time < b.time; });

  TemporalGraph g;
  long long max_id = 0;
  double tmin = raw.front().time;
  double tmax = raw.back().time;
  g.raw_time_min = tmin;
  g.raw_time_max = tmax;
  const double range = tmax - tmin;
  g.interactions.reserve(raw.size());
  for (const auto& e : raw) {
    max_id = std::max(max_id, std::max(e.src, e.dst));
    Interaction it;
    it.src = static_cast<NodeId>(e.src);
    it.dst = static_cast<NodeId>(e.dst);
    if (opts.normalize_time) {
      it.time = (range > 0.0) ? (e.time - tmin) / range : 0.0;
    } else {
      it.time = e.time;
    }
    if (it.src == it.dst) g.self_loop_count++;
    g.interactions.push_back(it);
  }
  g.num_nodes = static_cast<NodeId>(max_id + 1);
  return g;
}

TemporalGraph parse_edge_list_file(const std::string& path,
                                   const ParseOptions& opts) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open edge list: " + path);
  return parse_edge_list(f, opts);
}

std::pair<TemporalGraph, std::vector<Interaction>> chronological_split(
    const TemporalGraph& g, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train_fraction must be in (0,1)");
  }
  const auto n = g.interactions.size();
  const auto n_train = static_cast<std::size_t>(
      std::floor(train_fraction * static_cast<double>(n)));
  TemporalGraph train = g;
  train.interactions.assign(g.interactions.begin(),
                            g.interactions.begin() + static_cast<long>(n_train));
  std::vector<Interaction> test(g.interactions.begin() + static_cast<long>(n_train),
                                g.interactions.end());
  train.self_loop_count = 0;
  for (const auto& e : train.interactions)
    if (e.src == e.dst) train.self_loop_count++;
  return {std::move(train), std::move(test)};
}

void NeighborSequence::record(NodeId neighbor, double time) {
  if (!entries_.empty() && time < entries_.back().time) {
    throw std::runtime_error("record: out-of-order time " + std::to_string(time) +
                             " after " + std::to_string(entries_.back().time));
  }
  if (valid_count() == capacity_) {
    entries_.erase(entries_.begin());
  }
  entries_.push_back(Entry{neighbor, time});
}

std::vector<NeighborSequence::Entry> NeighborSequence::view(double horizon) const {
  std::vector<Entry> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) {
    if (e.time <= horizon) out.push_back(e);
  }
  return out;
}

SequenceStore::SequenceStore(NodeId num_nodes, int seq_len)
    : seq_len_(seq_len),
      seqs_(static_cast<size_t>(num_nodes), NeighborSequence(seq_len)),
      versions_(static_cast<size_t>(num_nodes), 0) {}

const NeighborSequence& SequenceStore::neighbors_at(NodeId node) const {
  if (node < 0 || node >= num_nodes()) {
    throw std::out_of_range("neighbors_at: unknown node " + std::to_string(node));
  }
  return seqs_[static_cast<size_t>(node)];
}

std::uint32_t SequenceStore::version(NodeId node) const {
  return versions_.at(static_cast<size_t>(node));
}

void SequenceStore::apply(const Interaction& e) {
  if (e.src < 0 || e.src >= num_nodes() || e.dst < 0 || e.dst >= num_nodes()) {
    throw std::out_of_range("apply: node id out of range");
  }
  seqs_[static_cast<size_t>(e.src)].record(e.dst, e.time);
  versions_[static_cast<size_t>(e.src)]++;
  if (e.dst != e.src) {
    seqs_[static_cast<size_t>(e.dst)].record(e.src, e.time);
    versions_[static_cast<size_t>(e.dst)]++;
  }
}

void SequenceStore::reset() {
  for (auto& s : seqs_) s = NeighborSequence(seq_len_);
  std::fill(versions_.begin(), versions_.end(), 0u);
}

std::vector<Batch> make_batches(const TemporalGraph& g, int batch_size) {
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  std::vector<Batch> out;
  const auto n = g.interactions.size();
  const auto b = static_cast<std::size_t>(batch_size);
  out.reserve((n + b - 1) / b);
  for (std::size_t start = 0; start < n; start += b) {
    Batch batch;
    const std::size_t end = std::min(n, start + b);
    batch.pairs.assign(g.interactions.begin() + static_cast<long>(start),
                       g.interactions.begin() + static_cast<long>(end));
    for (const auto& e : batch.pairs) {
      batch.dynamics[e.src]++;
      if (e.dst != e.src) batch.dynamics[e.dst]++;
    }
    out.push_back(std::move(batch));
  }
  return out;
}

}  // namespace s2t
