#include <doctest.h>

#include <cmath>

#include "s2t/objective.hpp"
#include "oracles.hpp"

using namespace s2t;

namespace {

IntensityVector make_iv(std::initializer_list<double> vals) {
  IntensityVector iv;
  iv.vec.resize(static_cast<long>(vals.size()));
  long i = 0;
  for (double v : vals) iv.vec(i++) = v;
  iv.scalar = iv.vec.sum();
  return iv;
}

IntensityVector scalar_iv(double s) {
  IntensityVector iv;
  iv.vec.resize(1);
  iv.vec(0) = s;
  iv.scalar = s;
  return iv;
}

}  // namespace

TEST_CASE("sampler: zero-degree nodes never drawn") {
  NegativeSampler sampler({0, 5, 5}, 1.0, 99);
  for (int i = 0; i < 5000; ++i) {
    CHECK(sampler.draw() != 0);
  }
}

TEST_CASE("sampler: empirical frequencies track degrees") {
  NegativeSampler sampler({1, 3}, 1.0, 4);
  int c0 = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    if (sampler.draw() == 0) c0++;
  }
  const double f0 = static_cast<double>(c0) / n;
  CHECK(f0 == doctest::Approx(0.25).epsilon(0.04));  // +-0.01 absolute
  CHECK(std::abs(f0 - 0.25) < 0.01);
}

TEST_CASE("sampler: chi-square goodness of fit at significance 0.01") {
  // Degrees over 40 nodes, power 1.0.
  std::vector<std::int64_t> degrees;
  Rng rng(123);
  for (int i = 0; i < 40; ++i) {
    degrees.push_back(1 + static_cast<std::int64_t>(rng.uniform_index(30)));
  }
  NegativeSampler sampler(degrees, 1.0, 5);
  const int n = 100000;
  std::vector<int> counts(degrees.size(), 0);
  for (int i = 0; i < n; ++i) counts[static_cast<size_t>(sampler.draw())]++;

  double total_deg = 0;
  for (auto d : degrees) total_deg += static_cast<double>(d);
  double chi2 = 0.0;
  for (size_t i = 0; i < degrees.size(); ++i) {
    const double expected = n * static_cast<double>(degrees[i]) / total_deg;
    const double diff = counts[i] - expected;
    chi2 += diff * diff / expected;
  }
  // z_{0.99} = 2.3263478740408408
  const double crit = oracle::chi2_critical(static_cast<int>(degrees.size()) - 1,
                                            2.3263478740408408);
  CHECK(chi2 < crit);
}

TEST_CASE("sampler: rejection avoids self and partner; single node errors") {
  NegativeSampler sampler({3, 3, 3}, 1.0, 6);
  for (int i = 0; i < 200; ++i) {
    const auto negs = sampler.sample_negatives(0, 1, 2);
    REQUIRE(negs.size() == 2);
    for (auto v : negs) CHECK(v == 2);
  }
  CHECK_THROWS_AS(NegativeSampler({5}, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(sampler.sample_negatives(0, 1, 0), std::invalid_argument);
}

TEST_CASE("sampler: power reweights the distribution") {
  NegativeSampler sampler({1, 4}, 0.5, 8);  // masses 1 : 2
  int c0 = 0;
  const int n = 60000;
  for (int i = 0; i < n; ++i) {
    if (sampler.draw() == 0) c0++;
  }
  CHECK(static_cast<double>(c0) / n == doctest::Approx(1.0 / 3).epsilon(0.05));
}

TEST_CASE("task loss: frozen hand value") {
  // pos scalar 0, one neg scalar 0:
  // -log sigma(0) - log sigma(1) = 0.693147... + 0.313262... = 1.006409...
  const double got = task_loss(scalar_iv(0.0), {scalar_iv(0.0)});
  CHECK(got == doctest::Approx(1.0064088680781682).epsilon(1e-12));
}

TEST_CASE("task loss: saturation and monotonicity") {
  const double big = task_loss(scalar_iv(80.0), {scalar_iv(0.0)});
  const double only_neg = -std::log(oracle::sigmoid(1.0));
  CHECK(big == doctest::Approx(only_neg).epsilon(1e-9));

  double prev = task_loss(scalar_iv(-2.0), {scalar_iv(0.0)});
  for (double s = -1.5; s <= 2.0; s += 0.5) {
    const double cur = task_loss(scalar_iv(s), {scalar_iv(0.0)});
    CHECK(cur < prev);
    prev = cur;
  }
  prev = task_loss(scalar_iv(0.0), {scalar_iv(-2.0)});
  for (double s = -1.5; s <= 2.0; s += 0.5) {
    const double cur = task_loss(scalar_iv(0.0), {scalar_iv(s)});
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("task loss: conventional negative form") {
  // -log sigma(0) - log sigma(-1) with conventional form at neg scalar 1
  const double got = task_loss(scalar_iv(0.0), {scalar_iv(1.0)}, NegForm::Conventional);
  CHECK(got == doctest::Approx(-std::log(0.5) - std::log(oracle::sigmoid(-1.0))));
  CHECK_THROWS_AS(task_loss(scalar_iv(0.0), {}), std::invalid_argument);
}

TEST_CASE("alignment loss: zero at identity, frozen uniform cases") {
  const auto v = make_iv({0.3, -0.7, 1.2});
  CHECK(alignment_loss(v, v) == 0.0);

  // uniform difference 0.5 -> 0.5 * 0.25 = 0.125 per element
  const auto a = make_iv({0.5, 0.5});
  const auto z = make_iv({0.0, 0.0});
  CHECK(alignment_loss(a, z) == doctest::Approx(0.125));

  // uniform difference 2.0 -> 2 - 0.5 = 1.5 per element
  const auto b = make_iv({2.0, 2.0});
  CHECK(alignment_loss(b, z) == doctest::Approx(1.5));

  const auto c = make_iv({1.0});
  CHECK_THROWS_AS(alignment_loss(a, c), std::invalid_argument);
}

TEST_CASE("alignment loss: strictly positive off identity") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    IntensityVector a, b;
    a.vec.resize(4);
    b.vec.resize(4);
    for (int i = 0; i < 4; ++i) {
      a.vec(i) = rng.uniform(-2, 2);
      b.vec(i) = rng.uniform(-2, 2);
    }
    if ((a.vec - b.vec).cwiseAbs().maxCoeff() > 0) {
      CHECK(alignment_loss(a, b) > 0.0);
    }
  }
}

TEST_CASE("alignment loss: smooth-L1 is C1 at the threshold") {
  const double eps = 1e-6;
  auto h = [](double e) {
    IntensityVector a, b;
    a.vec = Eigen::RowVectorXd::Constant(1, e);
    b.vec = Eigen::RowVectorXd::Zero(1);
    return alignment_loss(a, b);
  };
  // value continuity at |e| = 1
  CHECK(std::abs(h(1.0 + eps) - h(1.0 - eps)) < 3.0 * eps);
  // derivative continuity: slope just below vs just above
  const double d_below = (h(1.0 - eps) - h(1.0 - 3 * eps)) / (2 * eps);
  const double d_above = (h(1.0 + 3 * eps) - h(1.0 + eps)) / (2 * eps);
  CHECK(std::abs(d_below - d_above) < 1e-4);
  CHECK(d_below == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("global loss: frozen hand values (intent mode)") {
  Eigen::RowVectorXd z = Eigen::RowVectorXd::Constant(2, 0.4);
  Eigen::RowVectorXd zero = Eigen::RowVectorXd::Zero(2);
  // z_x = z_y = z_g, alpha = beta = 0 -> -log sigma(0) = log 2
  CHECK(global_loss(z, z, z, zero, zero) == doctest::Approx(0.6931471805599453));

  // alpha = beta = (0.5, 0.5) at d=2: the dimension-averaged squared norms
  // add 0.25 + 0.25 = 0.5 in either mode
  Eigen::RowVectorXd half = Eigen::RowVectorXd::Constant(2, 0.5);
  const double intent = global_loss(z, z, z, half, half);
  CHECK(intent == doctest::Approx(0.6931471805599453 + 0.5));
  const double literal =
      global_loss(z, z, z, half, half, GlobalLossMode::Literal);
  CHECK(literal == doctest::Approx(-0.6931471805599453 + 0.5));
}

TEST_CASE("global loss: intent mode grows as z_x leaves z_g") {
  Eigen::RowVectorXd zg = Eigen::RowVectorXd::Zero(3);
  Eigen::RowVectorXd zy = Eigen::RowVectorXd::Zero(3);
  Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(3);
  double prev = -1.0;
  for (double r = 0.0; r < 3.0; r += 0.5) {
    Eigen::RowVectorXd zx = Eigen::RowVectorXd::Constant(3, r);
    const double cur = global_loss(zx, zy, zg, a, a);
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("global loss: literal mode is unbounded below along a ray") {
  Eigen::RowVectorXd zg = Eigen::RowVectorXd::Zero(3);
  Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(3);
  double prev = 1.0;
  bool decreasing = true;
  for (double r = 1.0; r <= 64.0; r *= 2.0) {
    Eigen::RowVectorXd zx = Eigen::RowVectorXd::Constant(3, r);
    const double cur = global_loss(zx, zg, zg, a, a, GlobalLossMode::Literal);
    if (cur >= prev) decreasing = false;
    prev = cur;
  }
  CHECK(decreasing);
  CHECK(prev < -1000.0);  // way below any fixed bound
}

TEST_CASE("total loss: exact weighted sum and linearity") {
  const auto b = total_loss(1.0, 2.0, 3.0, 0.5, 0.1);
  CHECK(b.total == doctest::Approx(2.3));
  CHECK(b.task == 1.0);
  CHECK(b.align == 2.0);
  CHECK(b.global_ == 3.0);

  const auto zero_etas = total_loss(1.7, 9.0, -4.0, 0.0, 0.0);
  CHECK(zero_etas.total == 1.7);

  // linear in each component
  const auto b2 = total_loss(1.0, 4.0, 3.0, 0.5, 0.1);
  CHECK(b2.total - b.total == doctest::Approx(0.5 * 2.0));
  CHECK_THROWS_AS(total_loss(1, 1, 1, -0.5, 0), std::invalid_argument);
}
