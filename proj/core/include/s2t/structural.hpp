#pragma once

#include <Eigen/Dense>
#include <map>
#include <tuple>
#include <vector>

#include "s2t/ad.hpp"
#include "s2t/graph.hpp"
#include "s2t/params.hpp"
#include "s2t/temporal.hpp"

namespace s2t {

// Normalized interaction-interval weights, w_i = (t_c - t_i) / sum of
// intervals; uniform when every interval is zero. Older neighbors get the
// larger weight.
std::vector<double> interval_weights(
    const std::vector<NeighborSequence::Entry>& view, double t_c);

// One GNN layer: act(z_self_prev * W_S + sum_i (neighbor_prevs[i] * W_N) * w_i).
Eigen::RowVectorXd gnn_layer(const Eigen::RowVectorXd& z_self_prev,
                             const std::vector<Eigen::RowVectorXd>& neighbor_prevs,
                             const std::vector<double>& w,
                             const Eigen::MatrixXd& w_self,
                             const Eigen::MatrixXd& w_nbr,
                             ad::Act act = ad::Act::Sigmoid);

// Memo cache for node_representation, keyed (node, depth, time). Valid only
// against a fixed store state.
using ReprMemo = std::map<std::tuple<NodeId, int, double>, Eigen::RowVectorXd>;

// Recursive time-weighted representation. Depth 0 is the base embedding;
// depth k aggregates each neighbor i at depth k-1 at that neighbor's
// interaction time t_i, over the node's sequence entries with time <= t.
Eigen::RowVectorXd node_representation(NodeId node, double t, int depth,
                                       const SequenceStore& store,
                                       const ModelParams& params,
                                       ad::Act act = ad::Act::Sigmoid,
                                       ReprMemo* memo = nullptr);

// vec[j] = -(z_x_t[j] - z_y_t[j])^2 * omega_g[j].
IntensityVector local_intensity(const Eigen::RowVectorXd& z_x_t,
                                const Eigen::RowVectorXd& z_y_t,
                                const Eigen::RowVectorXd& omega_g);

}  // namespace s2t
