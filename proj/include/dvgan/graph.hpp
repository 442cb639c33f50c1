#pragma once

#include <Eigen/Core>

#include <vector>

namespace dvgan {

using Mat = Eigen::MatrixXd;

// Handle to a node in a Graph.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Dynamic computation graph over 2-D double tensors with reverse-mode
// differentiation. Values are computed eagerly as nodes are created.
//
// gradients() builds the backward pass out of ordinary graph nodes, so the
// result is itself differentiable; calling gradients() on a function of a
// gradient (as the WGAN-GP penalty does) yields correct second derivatives.
class Graph {
 public:
  Graph() { nodes_.reserve(1024); }
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // Leaves. Constants are excluded from differentiation; leaves participate.
  Var constant(Mat value);
  Var leaf(Mat value);
  Var scalar(double value) { return constant(Mat::Constant(1, 1, value)); }
  Var zeros(Eigen::Index r, Eigen::Index c) { return constant(Mat::Zero(r, c)); }
  Var ones(Eigen::Index r, Eigen::Index c) { return constant(Mat::Ones(r, c)); }

  const Mat& value(Var v) const;
  Eigen::Index rows(Var v) const { return value(v).rows(); }
  Eigen::Index cols(Var v) const { return value(v).cols(); }
  size_t size() const { return nodes_.size(); }

  // Elementwise and linear algebra.
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var neg(Var a);
  Var mul(Var a, Var b);  // elementwise
  Var scalar_mul(Var a, double s);
  Var matmul(Var a, Var b);
  Var transpose(Var a);

  // Nonlinearities.
  Var relu(Var a);
  Var heaviside(Var a);  // 1 where a > 0; blocks gradients
  Var sigmoid(Var a);
  Var tanh_(Var a);
  Var exp_(Var a);
  Var log_(Var a);
  Var pow_const(Var a, double p);

  // Reductions and broadcasts.
  Var sum_all(Var a);       // -> 1x1
  Var mean_all(Var a);      // -> 1x1
  Var sum_rows(Var a);      // TxC -> 1xC
  Var mean_rows(Var a);     // TxC -> 1xC
  Var broadcast_rows(Var a, Eigen::Index t);              // 1xC -> TxC
  Var broadcast_scalar(Var a, Eigen::Index r, Eigen::Index c);  // 1x1 -> rxc

  // Structure.
  Var concat_cols(Var a, Var b);
  Var concat_rows(const std::vector<Var>& parts);
  Var slice_rows(Var a, Eigen::Index r0, Eigen::Index r1);
  Var slice_cols(Var a, Eigen::Index c0, Eigen::Index c1);
  Var pad_rows(Var a, Eigen::Index offset, Eigen::Index total);
  Var pad_cols(Var a, Eigen::Index offset, Eigen::Index total);

  // 1-D convolution support. unfold turns a TxC sequence into TxKC patch
  // rows (zero padded, K odd), so a convolution is a single matmul.
  Var unfold1d(Var a, int kernel);
  Var fold1d(Var a, int kernel);

  // Time-axis resampling: non-overlapping pairwise mean / nearest
  // replication.
  Var downsample2x(Var a);
  Var upsample2x(Var a);

  // Row gather/scatter, used for embedding lookups. scatter_rows adds
  // duplicate indices.
  Var select_rows(Var a, std::vector<int> idx);
  Var scatter_rows(Var a, std::vector<int> idx, Eigen::Index total_rows);

  Var stop_grad(Var a);

  // d(scalar output)/d(each wrt), as new graph nodes. Entries of `wrt` the
  // output does not depend on get zero gradients of matching shape.
  std::vector<Var> gradients(Var output, const std::vector<Var>& wrt);

 private:
  enum class Op : unsigned char {
    kConstant, kLeaf, kAdd, kSub, kNeg, kMul, kScalarMul, kMatMul, kTranspose,
    kRelu, kHeaviside, kSigmoid, kTanh, kExp, kLog, kPowConst,
    kSumAll, kMeanAll, kSumRows, kMeanRows, kBroadcastRows, kBroadcastScalar,
    kConcatCols, kConcatRows, kSliceRows, kSliceCols, kPadRows, kPadCols,
    kUnfold, kFold, kDown2, kUp2, kSelectRows, kScatterRows, kStopGrad,
  };

  struct Node {
    Op op;
    bool grad = false;  // depends differentiably on some leaf
    int a = -1, b = -1;
    Eigen::Index i0 = 0, i1 = 0;
    double s = 0.0;
    std::vector<int> idx;
    Mat val;
  };

  Var push(Node node);
  Var unary(Op op, Var a, Mat val, Eigen::Index i0 = 0, Eigen::Index i1 = 0, double s = 0.0);
  Var binary(Op op, Var a, Var b, Mat val);
  const Node& node(Var v) const;
  void check(Var v) const;

  std::vector<Node> nodes_;
};

// Composites used throughout the networks.

// y = x W^T + b with x TxIn, W OutxIn, b 1xOut.
Var linear(Graph& g, Var x, Var W, Var b);

// Length-preserving 1-D convolution, stride 1, zero padding (K-1)/2.
// x TxCin, W Coutx(K*Cin), b 1xCout.
Var conv1d(Graph& g, Var x, Var W, Var b, int kernel);

// log(sum(exp(x))) over all entries of a row vector, shift-stabilized.
Var logsumexp_row(Graph& g, Var x);

}  // namespace dvgan
