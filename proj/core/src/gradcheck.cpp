#include "s2t/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "s2t/rng.hpp"

namespace s2t {

std::string GradReport::summary() const {
  std::ostringstream os;
  os << (pass ? "PASS" : "FAIL") << " (max rel err " << max_rel_err
     << ", tol " << tolerance << ")\n";
  for (const auto& e : entries) {
    os << "  " << e.name << ": max rel err " << e.max_rel_err << " over "
       << e.coords_checked << " coords\n";
  }
  return os.str();
}

GradReport finite_difference_check(const std::function<double()>& loss_eval,
                                   ModelParams& params,
                                   const GradBundle& analytic, double eps,
                                   double tolerance, int min_coords_per_tensor,
                                   std::uint64_t seed) {
  if (!(eps > 0.0)) throw std::invalid_argument("finite_difference_check: eps <= 0");
  Rng rng(seed);
  GradReport report;
  report.tolerance = tolerance;

  auto refs = params.tensors();
  if (refs.size() != analytic.grads.size()) {
    throw std::invalid_argument("finite_difference_check: grad bundle mismatch");
  }

  for (size_t ti = 0; ti < refs.size(); ++ti) {
    auto& ref = refs[ti];
    const long n = ref.size();
    std::vector<long> coords(static_cast<size_t>(n));
    std::iota(coords.begin(), coords.end(), 0l);
    if (n > min_coords_per_tensor) {
      // Seeded partial Fisher-Yates; take the first k.
      for (long i = 0; i < min_coords_per_tensor; ++i) {
        const long j = i + static_cast<long>(rng.uniform_index(
                               static_cast<std::uint64_t>(n - i)));
        std::swap(coords[static_cast<size_t>(i)], coords[static_cast<size_t>(j)]);
      }
      coords.resize(static_cast<size_t>(min_coords_per_tensor));
    }

    GradEntry entry;
    entry.name = ref.name;
    entry.coords_checked = static_cast<int>(coords.size());
    for (long k : coords) {
      const double orig = ref.data[k];
      ref.data[k] = orig + eps;
      const double up = loss_eval();
      ref.data[k] = orig - eps;
      const double down = loss_eval();
      ref.data[k] = orig;
      const double numeric = (up - down) / (2.0 * eps);
      const double analytic_v =
          analytic.grads[ti].data()[k];
      const double denom = std::max({1.0, std::abs(analytic_v), std::abs(numeric)});
      const double rel = std::abs(analytic_v - numeric) / denom;
      entry.max_rel_err = std::max(entry.max_rel_err, rel);
    }
    report.max_rel_err = std::max(report.max_rel_err, entry.max_rel_err);
    report.entries.push_back(std::move(entry));
  }
  report.pass = report.max_rel_err < tolerance;
  return report;
}

}  // namespace s2t
