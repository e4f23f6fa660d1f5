#include "s2t/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "s2t/ad.hpp"
#include "s2t/rng.hpp"
#include "s2t/structural.hpp"

namespace s2t {

Eigen::RowVectorXd pair_feature(const Eigen::RowVectorXd& a,
                                const Eigen::RowVectorXd& b, PairFeature kind) {
  switch (kind) {
    case PairFeature::Product:
      return a.cwiseProduct(b);
    case PairFeature::AbsDiff:
      return (a - b).cwiseAbs();
    case PairFeature::Concat: {
      Eigen::RowVectorXd out(a.cols() + b.cols());
      out << a, b;
      return out;
    }
  }
  return a;
}

Eigen::MatrixXd final_representations(const ModelParams& params,
                                      const GlobalState& g,
                                      const SequenceStore& store,
                                      const TemporalGraph& train_g,
                                      AblationMode mode,
                                      const EvalConfig& cfg) {
  const int n = params.num_nodes;
  Eigen::MatrixXd reps(n, params.dim);
  const bool base_only =
      cfg.repr == ReprSource::Base || !mode_uses_gnn(mode);
  if (base_only) {
    for (int v = 0; v < n; ++v) reps.row(v) = base_embedding(params, v);
    return reps;
  }
  const double t_end = train_g.interactions.back().time;
  ReprMemo memo;
  for (int v = 0; v < n; ++v) {
    reps.row(v) = node_representation(v, t_end, params.layers, store, params,
                                      cfg.gnn_act, &memo);
  }
  if (mode_uses_global(mode)) {
    const auto deg = train_g.degrees();
    for (int v = 0; v < n; ++v) {
      const auto dyn = std::max<std::int64_t>(1, deg[static_cast<size_t>(v)]);
      reps.row(v) += (params.theta_d / static_cast<double>(dyn)) * g.z_g;
    }
  }
  return reps;
}

void LogisticRegression::fit(const Eigen::MatrixXd& x, const std::vector<int>& y,
                             int iters, double lr, double l2) {
  const long n = x.rows();
  const long d = x.cols();
  if (n == 0 || static_cast<long>(y.size()) != n) {
    throw std::invalid_argument("LogisticRegression: bad training set");
  }
  int pos = 0;
  for (int v : y) pos += v;
  if (pos == 0 || pos == n) {
    throw std::runtime_error("LogisticRegression: single-class training set");
  }

  mean = x.colwise().mean();
  Eigen::RowVectorXd var =
      ((x.rowwise() - mean).array().square().colwise().sum() /
       static_cast<double>(n))
          .matrix();
  scale = var.array().sqrt().max(1e-12).matrix();
  Eigen::MatrixXd xs = (x.rowwise() - mean).array().rowwise() / scale.array();

  Eigen::VectorXd t(n);
  for (long i = 0; i < n; ++i) t(i) = y[static_cast<size_t>(i)] ? 1.0 : 0.0;

  w = Eigen::VectorXd::Zero(d);
  b = 0.0;
  // Full-batch Adam.
  Eigen::VectorXd m = Eigen::VectorXd::Zero(d), v2 = Eigen::VectorXd::Zero(d);
  double mb = 0.0, vb = 0.0;
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int it = 1; it <= iters; ++it) {
    Eigen::VectorXd z = xs * w;
    z.array() += b;
    Eigen::VectorXd p = z.unaryExpr([](double u) { return ad::sigmoid_scalar(u); });
    Eigen::VectorXd diff = p - t;
    Eigen::VectorXd gw = xs.transpose() * diff * inv_n + l2 * w;
    const double gb = diff.sum() * inv_n;
    m = b1 * m + (1 - b1) * gw;
    v2 = b2 * v2 + (1 - b2) * gw.cwiseProduct(gw);
    mb = b1 * mb + (1 - b1) * gb;
    vb = b2 * vb + (1 - b2) * gb * gb;
    const double c1 = 1.0 - std::pow(b1, it), c2 = 1.0 - std::pow(b2, it);
    w -= lr * (m / c1).cwiseQuotient(((v2 / c2).cwiseSqrt().array() + eps).matrix());
    b -= lr * (mb / c1) / (std::sqrt(vb / c2) + eps);
  }
}

double LogisticRegression::predict_proba(const Eigen::RowVectorXd& f) const {
  const Eigen::RowVectorXd fs =
      ((f - mean).array() / scale.array()).matrix();
  return ad::sigmoid_scalar(fs.dot(w) + b);
}

namespace {

inline std::uint64_t pair_key(NodeId a, NodeId b, NodeId n) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return lo * static_cast<std::uint64_t>(n) + hi;
}

}  // namespace

EvalReport evaluate_link_prediction(const ModelParams& params,
                                    const GlobalState& g,
                                    const SequenceStore& store,
                                    const TemporalGraph& train_g,
                                    const std::vector<Interaction>& test,
                                    AblationMode mode, const EvalConfig& cfg) {
  if (test.empty()) {
    throw std::invalid_argument("evaluate_link_prediction: empty test set");
  }
  const auto t_start = std::chrono::steady_clock::now();
  const NodeId n = params.num_nodes;
  if (n < 2) {
    throw std::invalid_argument("evaluate_link_prediction: need >= 2 nodes");
  }

  const Eigen::MatrixXd reps =
      final_representations(params, g, store, train_g, mode, cfg);

  std::unordered_set<std::uint64_t> train_pairs;
  train_pairs.reserve(train_g.interactions.size() * 2);
  for (const auto& e : train_g.interactions) {
    train_pairs.insert(pair_key(e.src, e.dst, n));
  }
  std::unordered_set<std::uint64_t> all_pairs = train_pairs;
  all_pairs.reserve(train_pairs.size() + test.size() * 2);
  for (const auto& e : test) all_pairs.insert(pair_key(e.src, e.dst, n));

  Rng rng(cfg.seed * 0x9e3779b97f4a7c15ULL + 0x1234567);
  auto sample_pair = [&](const std::unordered_set<std::uint64_t>& forbidden) {
    for (int attempt = 0; attempt < 100000; ++attempt) {
      const auto u = static_cast<NodeId>(rng.uniform_index(static_cast<std::uint64_t>(n)));
      const auto v = static_cast<NodeId>(rng.uniform_index(static_cast<std::uint64_t>(n)));
      if (u == v) continue;
      if (forbidden.count(pair_key(u, v, n))) continue;
      return std::make_pair(u, v);
    }
    throw std::runtime_error("evaluate_link_prediction: negative sampling stuck");
  };

  const auto feat = [&](NodeId a, NodeId b) {
    return pair_feature(reps.row(a), reps.row(b), cfg.feature);
  };
  const long fd = feat(0, std::min<NodeId>(1, n - 1)).cols();

  // Classifier training set: training interactions as positives plus an
  // equal number of sampled training negatives.
  const long n_train = static_cast<long>(train_g.interactions.size());
  Eigen::MatrixXd x(2 * n_train, fd);
  std::vector<int> y(static_cast<size_t>(2 * n_train));
  for (long i = 0; i < n_train; ++i) {
    const auto& e = train_g.interactions[static_cast<size_t>(i)];
    x.row(i) = feat(e.src, e.dst);
    y[static_cast<size_t>(i)] = 1;
  }
  for (long i = 0; i < n_train; ++i) {
    const auto [u, v] = sample_pair(train_pairs);
    x.row(n_train + i) = feat(u, v);
    y[static_cast<size_t>(n_train + i)] = 0;
  }

  LogisticRegression clf;
  clf.fit(x, y, cfg.lr_iters, cfg.lr_rate, cfg.l2);

  // Balanced test: each test interaction, plus one never-interacted pair.
  long tp = 0, fp = 0, tn = 0, fn = 0;
  for (const auto& e : test) {
    if (clf.predict_proba(feat(e.src, e.dst)) > 0.5) {
      tp++;
    } else {
      fn++;
    }
    const auto [u, v] = sample_pair(all_pairs);
    if (clf.predict_proba(feat(u, v)) > 0.5) {
      fp++;
    } else {
      tn++;
    }
  }

  EvalReport rep;
  rep.n_pos = static_cast<int>(test.size());
  rep.n_neg = static_cast<int>(test.size());
  rep.seed = cfg.seed;
  rep.accuracy = static_cast<double>(tp + tn) / static_cast<double>(tp + tn + fp + fn);
  const double prec = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  const double rec = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  rep.f1 = (prec + rec) > 0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
  rep.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return rep;
}

}  // namespace s2t
