#include "s2t/ad.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace s2t::ad {

double sigmoid_scalar(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus_scalar(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

Var Tape::emit(Mat value, bool requires_grad, std::function<void(Tape&)> back) {
  Node n;
  n.val = std::move(value);
  n.requires_grad = requires_grad;
  n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Mat& Tape::grad_ref(int id) {
  Node& n = nodes_[static_cast<size_t>(id)];
  if (n.grad.size() == 0) {
    n.grad = Mat::Zero(n.val.rows(), n.val.cols());
  }
  return n.grad;
}

void Tape::accumulate(int id, const Mat& g) {
  if (!nodes_[static_cast<size_t>(id)].requires_grad) return;
  grad_ref(id) += g;
}

Mat Tape::grad(Var v) const {
  const Node& n = nodes_[static_cast<size_t>(v.id)];
  if (n.grad.size() == 0) return Mat::Zero(n.val.rows(), n.val.cols());
  return n.grad;
}

Var Tape::input(Mat value, bool requires_grad) {
  return emit(std::move(value), requires_grad, nullptr);
}

Var Tape::scalar(double v, bool requires_grad) {
  Mat m(1, 1);
  m(0, 0) = v;
  return input(std::move(m), requires_grad);
}

static void check_same_shape(const Mat& a, const Mat& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch");
  }
}

Var Tape::add(Var a, Var b) {
  check_same_shape(value(a), value(b), "add");
  const bool rg = requires_grad(a) || requires_grad(b);
  Mat out = value(a) + value(b);
  int out_id = static_cast<int>(nodes_.size());
  return emit(std::move(out), rg, [a, b, out_id](Tape& t) {
    const Mat& g = t.grad_ref(out_id);
    t.accumulate(a.id, g);
    t.accumulate(b.id, g);
  });
}

Var Tape::sub(Var a, Var b) {
  check_same_shape(value(a), value(b), "sub");
  const bool rg = requires_grad(a) || requires_grad(b);
  Mat out = value(a) - value(b);
  int out_id = static_cast<int>(nodes_.size());
  return emit(std::move(out), rg, [a, b, out_id](Tape& t) {
    const Mat& g = t.grad_ref(out_id);
    t.accumulate(a.id, g);
    t.accumulate(b.id, -g);
  });
}

Var Tape::hadamard(Var a, Var b) {
  check_same_shape(value(a), value(b), "hadamard");
  const bool rg = requires_grad(a) || requires_grad(b);
  Mat out = value(a).cwiseProduct(value(b));
  int out_id = static_cast<int>(nodes_.size());
  return emit(std::move(out), rg, [a, b, out_id](Tape& t) {
    const Mat& g = t.grad_ref(out_id);
    t.accumulate(a.id, g.cwiseProduct(t.value(b)));
    t.accumulate(b.id, g.cwiseProduct(t.value(a)));
  });
}

Var Tape::matmul(Var a, Var b) {
  if (value(a).cols() != value(b).rows()) {
    throw std::invalid_argument("matmul: inner dimension mismatch");
  }
  const bool rg = requires_grad(a) || requires_grad(b);
  Mat out = value(a) * value(b);
  int out_id = static_cast<int>(nodes_.size());
  return emit(std::move(out), rg, [a, b, out_id](Tape& t) {
    const Mat& g = t.grad_ref(out_id);
    if (t.requires_grad(a)) t.accumulate(a.id, g * t.value(b).transpose());
    if (t.requires_grad(b)) t.accumulate(b.id, t.value(a).transpose() * g);
  });
}

Var Tape::transpose(Var a) {
  Mat out = value(a).transpose();
  int out_id = static_cast<int>(nodes_.size());
  return emit(std::move(out), requires_grad(a), [a, out_id](Tape& t) {
    t.accumulate(a.id, t.grad_ref(out_id).transpose());
  });
}

Var Tape::scale(Var a, double c) {
  Mat out = value(a) * c;
  int out_id = static_cast<int>(nodes_.size());
  return emit(std::move(out), requires_grad(a), [a, c, out_id](Tape& t) {
    t.accumulate(a.id, t.grad_ref(out_id) * c);
  });
}

Var Tape::add_const(Var a, double c) {
  Mat out = value(a).array() + c;
  int out_id = static_cast<int>(nodes_.size());
  return emit(std::move(out), requires_grad(a), [a, out_id](Tape& t) {
    t.accumulate(a.id, t.grad_ref(out_id));
  });
}

Var Tape::smul(Var s, Var a) {
  if (value(s).size() != 1) throw std::invalid_argument("smul: scalar must be 1x1");
  const bool rg = requires_grad(s) || requires_grad(a);
  Mat out = value(a) * value(s)(0, 0);
  int out_id = static_cast<int>(nodes_.size());
  return emit(std::move(out), rg, [s, a, out_id](Tape& t) {
    const Mat& g = t.grad_ref(out_id);
    if (t.requires_grad(s)) {
      Mat gs(1, 1);
      gs(0, 0) = g.cwiseProduct(t.value(a)).sum();
      t.accumulate(s.id, gs);
    }
    if (t.requires_grad(a)) t.accumulate(a.id, g * t.value(s)(0, 0));
  });
}

Var Tape::gather_rows(Var a, std::vector<int> idx) {
  const Mat& src = value(a);
  Mat out(static_cast<long>(idx.size()), src.cols());
  for (size_t r = 0; r < idx.size(); ++r) {
    out.row(static_cast<long>(r)) = src.row(idx[r]);
  }
  int out_id = static_cast<int>(nodes_.size());
  return emit(std::move(out), requires_grad(a),
              [a, idx = std::move(idx), out_id](Tape& t) {
                const Mat& g = t.grad_ref(out_id);
                Mat& ga = t.grad_ref(a.id);
                for (size_t r = 0; r < idx.size(); ++r) {
                  ga.row(idx[r]) += g.row(static_cast<long>(r));
                }
              });
}

Var Tape::wsum_rows(Var a,
                    std::vector<std::vector<std::pair<int, double>>> groups) {
  const Mat& src = value(a);
  Mat out = Mat::Zero(static_cast<long>(groups.size()), src.cols());
  for (size_t r = 0; r < groups.size(); ++r) {
    for (const auto& [i, w] : groups[r]) {
      out.row(static_cast<long>(r)) += w * src.row(i);
    }
  }
  int out_id = static_cast<int>(nodes_.size());
  return emit(std::move(out), requires_grad(a),
              [a, groups = std::move(groups), out_id](Tape& t) {
                const Mat& g = t.grad_ref(out_id);
                Mat& ga = t.grad_ref(a.id);
                for (size_t r = 0; r < groups.size(); ++r) {
                  for (const auto& [i, w] : groups[r]) {
                    ga.row(i) += w * g.row(static_cast<long>(r));
                  }
                }
              });
}

Var Tape::concat_cols(Var a, Var b) {
  const Mat& va = value(a);
  const Mat& vb = value(b);
  if (va.rows() != vb.rows()) {
    throw std::invalid_argument("concat_cols: row count mismatch");
  }
  Mat out(va.rows(), va.cols() + vb.cols());
  out.leftCols(va.cols()) = va;
  out.rightCols(vb.cols()) = vb;
  const bool rg = requires_grad(a) || requires_grad(b);
  int out_id = static_cast<int>(nodes_.size());
  const long ca = va.cols(), cb = vb.cols();
  return emit(std::move(out), rg, [a, b, ca, cb, out_id](Tape& t) {
    const Mat& g = t.grad_ref(out_id);
    t.accumulate(a.id, g.leftCols(ca));
    t.accumulate(b.id, g.rightCols(cb));
  });
}

Var Tape::add_rowvec(Var m, Var v) {
  const Mat& vm = value(m);
  const Mat& vv = value(v);
  if (vv.rows() != 1 || vv.cols() != vm.cols()) {
    throw std::invalid_argument("add_rowvec: v must be 1 x cols(m)");
  }
  Mat out = vm.rowwise() + vv.row(0);
  const bool rg = requires_grad(m) || requires_grad(v);
  int out_id = static_cast<int>(nodes_.size());
  return emit(std::move(out), rg, [m, v, out_id](Tape& t) {
    const Mat& g = t.grad_ref(out_id);
    t.accumulate(m.id, g);
    if (t.requires_grad(v)) t.accumulate(v.id, g.colwise().sum());
  });
}

Var Tape::sub_rowvec(Var m, Var v) {
  const Mat& vm = value(m);
  const Mat& vv = value(v);
  if (vv.rows() != 1 || vv.cols() != vm.cols()) {
    throw std::invalid_argument("sub_rowvec: v must be 1 x cols(m)");
  }
  Mat out = vm.rowwise() - vv.row(0);
  const bool rg = requires_grad(m) || requires_grad(v);
  int out_id = static_cast<int>(nodes_.size());
  return emit(std::move(out), rg, [m, v, out_id](Tape& t) {
    const Mat& g = t.grad_ref(out_id);
    t.accumulate(m.id, g);
    if (t.requires_grad(v)) t.accumulate(v.id, -g.colwise().sum());
  });
}

Var Tape::mul_rowvec(Var m, Var v) {
  const Mat& vm = value(m);
  const Mat& vv = value(v);
  if (vv.rows() != 1 || vv.cols() != vm.cols()) {
    throw std::invalid_argument("mul_rowvec: v must be 1 x cols(m)");
  }
  Mat out = vm.array().rowwise() * vv.row(0).array();
  const bool rg = requires_grad(m) || requires_grad(v);
  int out_id = static_cast<int>(nodes_.size());
  return emit(std::move(out), rg, [m, v, out_id](Tape& t) {
    const Mat& g = t.grad_ref(out_id);
    if (t.requires_grad(m)) {
      t.accumulate(m.id, g.array().rowwise() * t.value(v).row(0).array());
    }
    if (t.requires_grad(v)) {
      t.accumulate(v.id, g.cwiseProduct(t.value(m)).colwise().sum());
    }
  });
}

Var Tape::add_scaled_outer(Var m, std::vector<double> a, Var s, Var z) {
  const Mat& vm = value(m);
  const Mat& vz = value(z);
  if (vz.rows() != 1 || vz.cols() != vm.cols()) {
    throw std::invalid_argument("add_scaled_outer: z must be 1 x cols(m)");
  }
  if (static_cast<long>(a.size()) != vm.rows()) {
    throw std::invalid_argument("add_scaled_outer: weights/rows mismatch");
  }
  const double sv = value(s)(0, 0);
  Mat out = vm;
  for (long r = 0; r < out.rows(); ++r) {
    out.row(r) += sv * a[static_cast<size_t>(r)] * vz.row(0);
  }
  const bool rg = requires_grad(m) || requires_grad(s) || requires_grad(z);
  int out_id = static_cast<int>(nodes_.size());
  return emit(std::move(out), rg, [m, s, z, a = std::move(a), out_id](Tape& t) {
    const Mat& g = t.grad_ref(out_id);
    t.accumulate(m.id, g);
    if (t.requires_grad(s)) {
      double acc = 0.0;
      const Mat& vz = t.value(z);
      for (long r = 0; r < g.rows(); ++r) {
        acc += a[static_cast<size_t>(r)] * g.row(r).dot(vz.row(0));
      }
      Mat gs(1, 1);
      gs(0, 0) = acc;
      t.accumulate(s.id, gs);
    }
    if (t.requires_grad(z)) {
      Mat gz = Mat::Zero(1, g.cols());
      const double sv = t.value(s)(0, 0);
      for (long r = 0; r < g.rows(); ++r) {
        gz.row(0) += sv * a[static_cast<size_t>(r)] * g.row(r);
      }
      t.accumulate(z.id, gz);
    }
  });
}

Var Tape::activation(Var a, Act kind) {
  const Mat& va = value(a);
  Mat out(va.rows(), va.cols());
  switch (kind) {
    case Act::Sigmoid:
      out = va.unaryExpr([](double x) { return sigmoid_scalar(x); });
      break;
    case Act::Tanh:
      out = va.array().tanh();
      break;
    case Act::Relu:
      out = va.cwiseMax(0.0);
      break;
  }
  int out_id = static_cast<int>(nodes_.size());
  return emit(std::move(out), requires_grad(a), [a, kind, out_id](Tape& t) {
    const Mat& g = t.grad_ref(out_id);
    const Mat& y = t.value(Var{out_id});
    switch (kind) {
      case Act::Sigmoid:
        t.accumulate(a.id, g.cwiseProduct(
                               (y.array() * (1.0 - y.array())).matrix()));
        break;
      case Act::Tanh:
        t.accumulate(a.id, g.cwiseProduct((1.0 - y.array().square()).matrix()));
        break;
      case Act::Relu:
        t.accumulate(a.id,
                     g.cwiseProduct((y.array() > 0.0).cast<double>().matrix()));
        break;
    }
  });
}

Var Tape::neg_sq(Var a) {
  Mat out = -value(a).array().square();
  int out_id = static_cast<int>(nodes_.size());
  return emit(std::move(out), requires_grad(a), [a, out_id](Tape& t) {
    const Mat& g = t.grad_ref(out_id);
    t.accumulate(a.id, (-2.0 * g.array() * t.value(a).array()).matrix());
  });
}

Var Tape::softplus(Var a) {
  Mat out = value(a).unaryExpr([](double x) { return softplus_scalar(x); });
  int out_id = static_cast<int>(nodes_.size());
  return emit(std::move(out), requires_grad(a), [a, out_id](Tape& t) {
    const Mat& g = t.grad_ref(out_id);
    const Mat s = t.value(a).unaryExpr([](double x) { return sigmoid_scalar(x); });
    t.accumulate(a.id, g.cwiseProduct(s));
  });
}

Var Tape::exp_neg_scale(Var s, std::vector<double> c) {
  if (value(s).size() != 1) {
    throw std::invalid_argument("exp_neg_scale: s must be 1x1");
  }
  const double sv = value(s)(0, 0);
  Mat out(static_cast<long>(c.size()), 1);
  for (size_t i = 0; i < c.size(); ++i) {
    out(static_cast<long>(i), 0) = std::exp(-sv * c[i]);
  }
  int out_id = static_cast<int>(nodes_.size());
  return emit(std::move(out), requires_grad(s), [s, c = std::move(c), out_id](Tape& t) {
    const Mat& g = t.grad_ref(out_id);
    const Mat& y = t.value(Var{out_id});
    double acc = 0.0;
    for (size_t i = 0; i < c.size(); ++i) {
      acc += -c[i] * y(static_cast<long>(i), 0) * g(static_cast<long>(i), 0);
    }
    Mat gs(1, 1);
    gs(0, 0) = acc;
    t.accumulate(s.id, gs);
  });
}

Var Tape::softmax_col(Var v) {
  const Mat& x = value(v);
  if (x.cols() != 1) throw std::invalid_argument("softmax_col: expected n x 1");
  const double m = x.maxCoeff();
  Mat e = (x.array() - m).exp();
  Mat out = e / e.sum();
  int out_id = static_cast<int>(nodes_.size());
  return emit(std::move(out), requires_grad(v), [v, out_id](Tape& t) {
    const Mat& g = t.grad_ref(out_id);
    const Mat& y = t.value(Var{out_id});
    const double dot = y.cwiseProduct(g).sum();
    t.accumulate(v.id, (y.array() * (g.array() - dot)).matrix());
  });
}

Var Tape::row_sum(Var m) {
  Mat out = value(m).rowwise().sum();
  int out_id = static_cast<int>(nodes_.size());
  return emit(std::move(out), requires_grad(m), [m, out_id](Tape& t) {
    const Mat& g = t.grad_ref(out_id);
    const Mat& vm = t.value(m);
    Mat gm(vm.rows(), vm.cols());
    for (long r = 0; r < vm.rows(); ++r) gm.row(r).setConstant(g(r, 0));
    t.accumulate(m.id, gm);
  });
}

Var Tape::sum(Var a) {
  Mat out(1, 1);
  out(0, 0) = value(a).sum();
  int out_id = static_cast<int>(nodes_.size());
  return emit(std::move(out), requires_grad(a), [a, out_id](Tape& t) {
    const double g = t.grad_ref(out_id)(0, 0);
    const Mat& va = t.value(a);
    t.accumulate(a.id, Mat::Constant(va.rows(), va.cols(), g));
  });
}

Var Tape::mean(Var a) {
  const double n = static_cast<double>(value(a).size());
  Mat out(1, 1);
  out(0, 0) = value(a).sum() / n;
  int out_id = static_cast<int>(nodes_.size());
  return emit(std::move(out), requires_grad(a), [a, n, out_id](Tape& t) {
    const double g = t.grad_ref(out_id)(0, 0) / n;
    const Mat& va = t.value(a);
    t.accumulate(a.id, Mat::Constant(va.rows(), va.cols(), g));
  });
}

Var Tape::stack_scalars(const std::vector<Var>& vs) {
  Mat out(static_cast<long>(vs.size()), 1);
  bool rg = false;
  for (size_t i = 0; i < vs.size(); ++i) {
    if (value(vs[i]).size() != 1) {
      throw std::invalid_argument("stack_scalars: inputs must be 1x1");
    }
    out(static_cast<long>(i), 0) = value(vs[i])(0, 0);
    rg = rg || requires_grad(vs[i]);
  }
  int out_id = static_cast<int>(nodes_.size());
  return emit(std::move(out), rg, [vs, out_id](Tape& t) {
    const Mat& g = t.grad_ref(out_id);
    Mat gi(1, 1);
    for (size_t i = 0; i < vs.size(); ++i) {
      gi(0, 0) = g(static_cast<long>(i), 0);
      t.accumulate(vs[i].id, gi);
    }
  });
}

Var Tape::smooth_l1_row_mean(Var a, Var b) {
  check_same_shape(value(a), value(b), "smooth_l1_row_mean");
  const Mat e = value(a) - value(b);
  const double inv_d = 1.0 / static_cast<double>(e.cols());
  Mat out(e.rows(), 1);
  for (long r = 0; r < e.rows(); ++r) {
    double acc = 0.0;
    for (long c = 0; c < e.cols(); ++c) {
      const double x = e(r, c);
      acc += (std::abs(x) < 1.0) ? 0.5 * x * x : std::abs(x) - 0.5;
    }
    out(r, 0) = acc * inv_d;
  }
  const bool rg = requires_grad(a) || requires_grad(b);
  int out_id = static_cast<int>(nodes_.size());
  return emit(std::move(out), rg, [a, b, inv_d, out_id](Tape& t) {
    const Mat& g = t.grad_ref(out_id);
    const Mat e = t.value(a) - t.value(b);
    Mat de(e.rows(), e.cols());
    for (long r = 0; r < e.rows(); ++r) {
      const double gr = g(r, 0) * inv_d;
      for (long c = 0; c < e.cols(); ++c) {
        const double x = e(r, c);
        const double d = (std::abs(x) < 1.0) ? x : (x > 0.0 ? 1.0 : -1.0);
        de(r, c) = gr * d;
      }
    }
    t.accumulate(a.id, de);
    t.accumulate(b.id, -de);
  });
}

void Tape::backward(Var loss) {
  if (value(loss).size() != 1) {
    throw std::invalid_argument("backward: loss must be scalar");
  }
  grad_ref(loss.id).setConstant(1.0);
  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (n.requires_grad && n.back && has_grad(id)) {
      n.back(*this);
    }
  }
}

}  // namespace s2t::ad
