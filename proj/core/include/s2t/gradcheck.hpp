#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "s2t/params.hpp"

namespace s2t {

// Analytic-vs-numeric comparison for one tensor.
struct GradEntry {
  std::string name;
  double max_rel_err = 0.0;
  int coords_checked = 0;
};

struct GradReport {
  std::vector<GradEntry> entries;
  double max_rel_err = 0.0;
  double tolerance = 1e-4;
  bool pass = false;

  std::string summary() const;
};

// Central finite differences against the analytic gradients in `analytic`.
// `loss_eval` must be deterministic: frozen batch, frozen negatives, frozen
// global state, no internal RNG. Checks a seeded random subset of at least
// `min_coords_per_tensor` coordinates per tensor (all of them for small
// tensors). Relative error uses max(1, |analytic|, |numeric|) in the
// denominator.
GradReport finite_difference_check(const std::function<double()>& loss_eval,
                                   ModelParams& params,
                                   const GradBundle& analytic, double eps,
                                   double tolerance = 1e-4,
                                   int min_coords_per_tensor = 32,
                                   std::uint64_t seed = 0x5eed);

}  // namespace s2t
