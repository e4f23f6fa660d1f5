#pragma once

#include <string>
#include <vector>

#include "s2t/gradcheck.hpp"
#include "s2t/plan.hpp"

namespace s2t {

// Whole-model gradient verification: analytic gradients of the task,
// alignment, and global losses (and their weighted total) against central
// finite differences, over a small synthetic stream.
struct ModelGradcheckConfig {
  int num_nodes = 16;
  long interactions = 64;
  int dim = 8;
  int seq_len = 4;
  int layers = 2;
  int batch_size = 4;
  int n_batches = 3;
  int negatives = 1;
  double eps = 1e-5;
  double tolerance = 1e-4;
  std::uint64_t seed = 1;
  AblationMode mode = AblationMode::Full;
  bool learn_etas = false;
  GlobalLossMode lg_mode = GlobalLossMode::Intent;
};

struct ModelGradcheckResult {
  // One merged report per loss kind ("task", "align", "global", "total").
  std::vector<std::pair<std::string, GradReport>> reports;
  bool pass = false;

  std::string summary() const;
};

ModelGradcheckResult run_model_gradcheck(const ModelGradcheckConfig& cfg);

}  // namespace s2t
