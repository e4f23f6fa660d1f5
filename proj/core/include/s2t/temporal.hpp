#pragma once

#include <Eigen/Dense>
#include <vector>

#include "s2t/graph.hpp"
#include "s2t/params.hpp"

namespace s2t {

// d-dimensional conditional intensity plus its scalar reduction.
struct IntensityVector {
  Eigen::RowVectorXd vec;
  double scalar = 0.0;
};

// vec[j] = -(z_x[j] - z_y[j])^2; scalar = -|z_x - z_y|^2.
IntensityVector base_intensity(const Eigen::RowVectorXd& z_x,
                               const Eigen::RowVectorXd& z_y);

// exp(-delta_t * (t_c - t_i)). Throws if t_c < t_i.
double time_decay(double t_c, double t_i, double delta_t);

// Softmax over scalar base intensities between each valid neighbor and the
// owner. Throws when the view is empty.
std::vector<double> neighbor_similarity_weights(
    const std::vector<NeighborSequence::Entry>& view,
    const Eigen::RowVectorXd& z_owner, const ModelParams& params);

// Hawkes temporal intensity between x and y at time t, built from base
// embeddings and both historical neighbor sequences (entries with time <= t).
IntensityVector temporal_intensity(NodeId x, NodeId y, double t,
                                   const SequenceStore& store,
                                   const ModelParams& params);

}  // namespace s2t
