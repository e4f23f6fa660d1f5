#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace s2t::ad {

using Mat = Eigen::MatrixXd;

enum class Act { Sigmoid, Tanh, Relu };

struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Reverse-mode tape over dense Eigen matrices. Scalars are 1x1. Every op
// records a closure that scatters the output gradient back to its inputs;
// backward() replays closures in reverse creation order.
class Tape {
 public:
  Var input(Mat value, bool requires_grad);
  Var constant(Mat value) { return input(std::move(value), false); }
  Var scalar(double v, bool requires_grad = false);

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var hadamard(Var a, Var b);
  Var matmul(Var a, Var b);
  Var transpose(Var a);
  Var scale(Var a, double c);
  Var add_const(Var a, double c);
  Var smul(Var s, Var a);  // 1x1 scalar times matrix

  Var gather_rows(Var a, std::vector<int> idx);
  // out.row(r) = sum_k w * a.row(i) over groups[r]; empty group -> zero row.
  Var wsum_rows(Var a, std::vector<std::vector<std::pair<int, double>>> groups);
  Var concat_cols(Var a, Var b);

  Var add_rowvec(Var m, Var v);  // v: 1 x d
  Var sub_rowvec(Var m, Var v);
  Var mul_rowvec(Var m, Var v);
  // m.row(r) + s * a[r] * z   (a constant per-row weights; s scalar; z 1 x d)
  Var add_scaled_outer(Var m, std::vector<double> a, Var s, Var z);

  Var activation(Var a, Act kind);
  Var sigmoid(Var a) { return activation(a, Act::Sigmoid); }
  Var neg_sq(Var a);    // -(a .* a)
  Var softplus(Var a);  // log(1 + exp(x)), stable
  Var exp_neg_scale(Var s, std::vector<double> c);  // y_i = exp(-s * c_i)
  Var softmax_col(Var v);                           // v: n x 1

  Var row_sum(Var m);  // n x d -> n x 1
  Var sum(Var a);      // -> 1 x 1
  Var mean(Var a);     // -> 1 x 1
  Var stack_scalars(const std::vector<Var>& vs);  // n 1x1 vars -> n x 1
  // mean over columns of smooth-L1(threshold 1) of (a - b), per row -> n x 1
  Var smooth_l1_row_mean(Var a, Var b);

  void backward(Var loss);

  const Mat& value(Var v) const { return nodes_[static_cast<size_t>(v.id)].val; }
  double scalar_value(Var v) const { return value(v)(0, 0); }
  // Zero matrix if the node never received a gradient.
  Mat grad(Var v) const;
  bool requires_grad(Var v) const {
    return nodes_[static_cast<size_t>(v.id)].requires_grad;
  }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Mat val;
    Mat grad;  // empty until first accumulation
    std::function<void(Tape&)> back;
    bool requires_grad = false;
  };

  Var emit(Mat value, bool requires_grad, std::function<void(Tape&)> back);
  Mat& grad_ref(int id);
  bool has_grad(int id) const {
    return nodes_[static_cast<size_t>(id)].grad.size() != 0;
  }
  void accumulate(int id, const Mat& g);

  std::vector<Node> nodes_;
};

double sigmoid_scalar(double x);
double softplus_scalar(double x);

}  // namespace s2t::ad
