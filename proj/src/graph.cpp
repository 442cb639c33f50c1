#include "dvgan/graph.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dvgan {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace

Var Graph::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

const Graph::Node& Graph::node(Var v) const {
  check(v);
  return nodes_[static_cast<size_t>(v.id)];
}

void Graph::check(Var v) const {
  require(v.id >= 0 && v.id < static_cast<int>(nodes_.size()), "invalid Var");
}

const Mat& Graph::value(Var v) const { return node(v).val; }

Var Graph::unary(Op op, Var a, Mat val, Eigen::Index i0, Eigen::Index i1, double s) {
  Node n;
  n.op = op;
  n.a = a.id;
  n.i0 = i0;
  n.i1 = i1;
  n.s = s;
  n.val = std::move(val);
  const bool blocks = op == Op::kHeaviside || op == Op::kStopGrad;
  n.grad = !blocks && node(a).grad;
  return push(std::move(n));
}

Var Graph::binary(Op op, Var a, Var b, Mat val) {
  Node n;
  n.op = op;
  n.a = a.id;
  n.b = b.id;
  n.val = std::move(val);
  n.grad = node(a).grad || node(b).grad;
  return push(std::move(n));
}

Var Graph::constant(Mat value) {
  Node n;
  n.op = Op::kConstant;
  n.val = std::move(value);
  n.grad = false;
  return push(std::move(n));
}

Var Graph::leaf(Mat value) {
  Node n;
  n.op = Op::kLeaf;
  n.val = std::move(value);
  n.grad = true;
  return push(std::move(n));
}

Var Graph::add(Var a, Var b) {
  require(value(a).rows() == value(b).rows() && value(a).cols() == value(b).cols(),
          "add: shape mismatch");
  return binary(Op::kAdd, a, b, value(a) + value(b));
}

Var Graph::sub(Var a, Var b) {
  require(value(a).rows() == value(b).rows() && value(a).cols() == value(b).cols(),
          "sub: shape mismatch");
  return binary(Op::kSub, a, b, value(a) - value(b));
}

Var Graph::neg(Var a) { return unary(Op::kNeg, a, -value(a)); }

Var Graph::mul(Var a, Var b) {
  require(value(a).rows() == value(b).rows() && value(a).cols() == value(b).cols(),
          "mul: shape mismatch");
  return binary(Op::kMul, a, b, value(a).cwiseProduct(value(b)));
}

Var Graph::scalar_mul(Var a, double s) {
  return unary(Op::kScalarMul, a, s * value(a), 0, 0, s);
}

Var Graph::matmul(Var a, Var b) {
  require(value(a).cols() == value(b).rows(), "matmul: inner dimension mismatch");
  return binary(Op::kMatMul, a, b, value(a) * value(b));
}

Var Graph::transpose(Var a) { return unary(Op::kTranspose, a, value(a).transpose()); }

Var Graph::relu(Var a) { return unary(Op::kRelu, a, value(a).cwiseMax(0.0)); }

Var Graph::heaviside(Var a) {
  return unary(Op::kHeaviside, a,
               (value(a).array() > 0.0).cast<double>().matrix());
}

Var Graph::sigmoid(Var a) {
  return unary(Op::kSigmoid, a,
               (1.0 / (1.0 + (-value(a).array()).exp())).matrix());
}

Var Graph::tanh_(Var a) { return unary(Op::kTanh, a, value(a).array().tanh().matrix()); }

Var Graph::exp_(Var a) { return unary(Op::kExp, a, value(a).array().exp().matrix()); }

Var Graph::log_(Var a) { return unary(Op::kLog, a, value(a).array().log().matrix()); }

Var Graph::pow_const(Var a, double p) {
  return unary(Op::kPowConst, a, value(a).array().pow(p).matrix(), 0, 0, p);
}

Var Graph::sum_all(Var a) {
  return unary(Op::kSumAll, a, Mat::Constant(1, 1, value(a).sum()));
}

Var Graph::mean_all(Var a) {
  return unary(Op::kMeanAll, a, Mat::Constant(1, 1, value(a).mean()));
}

Var Graph::sum_rows(Var a) {
  return unary(Op::kSumRows, a, value(a).colwise().sum());
}

Var Graph::mean_rows(Var a) {
  return unary(Op::kMeanRows, a, value(a).colwise().mean());
}

Var Graph::broadcast_rows(Var a, Eigen::Index t) {
  require(value(a).rows() == 1, "broadcast_rows: input must have one row");
  return unary(Op::kBroadcastRows, a, value(a).replicate(t, 1), t);
}

Var Graph::broadcast_scalar(Var a, Eigen::Index r, Eigen::Index c) {
  require(value(a).size() == 1, "broadcast_scalar: input must be 1x1");
  return unary(Op::kBroadcastScalar, a, Mat::Constant(r, c, value(a)(0, 0)), r, c);
}

Var Graph::concat_cols(Var a, Var b) {
  require(value(a).rows() == value(b).rows(), "concat_cols: row mismatch");
  Mat out(value(a).rows(), value(a).cols() + value(b).cols());
  out << value(a), value(b);
  return binary(Op::kConcatCols, a, b, std::move(out));
}

Var Graph::concat_rows(const std::vector<Var>& parts) {
  require(!parts.empty(), "concat_rows: no inputs");
  Eigen::Index rows = 0;
  const Eigen::Index cols = value(parts.front()).cols();
  for (Var part : parts) {
    require(value(part).cols() == cols, "concat_rows: column mismatch");
    rows += value(part).rows();
  }
  Mat out(rows, cols);
  Eigen::Index at = 0;
  Node n;
  n.op = Op::kConcatRows;
  n.idx.reserve(parts.size());
  for (Var part : parts) {
    out.middleRows(at, value(part).rows()) = value(part);
    at += value(part).rows();
    n.idx.push_back(part.id);
    n.grad = n.grad || node(part).grad;
  }
  n.val = std::move(out);
  return push(std::move(n));
}

Var Graph::slice_rows(Var a, Eigen::Index r0, Eigen::Index r1) {
  require(0 <= r0 && r0 < r1 && r1 <= value(a).rows(), "slice_rows: bad range");
  return unary(Op::kSliceRows, a, value(a).middleRows(r0, r1 - r0), r0, r1);
}

Var Graph::slice_cols(Var a, Eigen::Index c0, Eigen::Index c1) {
  require(0 <= c0 && c0 < c1 && c1 <= value(a).cols(), "slice_cols: bad range");
  return unary(Op::kSliceCols, a, value(a).middleCols(c0, c1 - c0), c0, c1);
}

Var Graph::pad_rows(Var a, Eigen::Index offset, Eigen::Index total) {
  require(offset >= 0 && offset + value(a).rows() <= total, "pad_rows: bad range");
  Mat out = Mat::Zero(total, value(a).cols());
  out.middleRows(offset, value(a).rows()) = value(a);
  return unary(Op::kPadRows, a, std::move(out), offset, total);
}

Var Graph::pad_cols(Var a, Eigen::Index offset, Eigen::Index total) {
  require(offset >= 0 && offset + value(a).cols() <= total, "pad_cols: bad range");
  Mat out = Mat::Zero(value(a).rows(), total);
  out.middleCols(offset, value(a).cols()) = value(a);
  return unary(Op::kPadCols, a, std::move(out), offset, total);
}

Var Graph::unfold1d(Var a, int kernel) {
  require(kernel >= 1 && kernel % 2 == 1, "unfold1d: kernel must be odd");
  const Mat& x = value(a);
  const Eigen::Index t = x.rows(), c = x.cols();
  const Eigen::Index pad = (kernel - 1) / 2;
  Mat out = Mat::Zero(t, kernel * c);
  for (Eigen::Index k = 0; k < kernel; ++k) {
    const Eigen::Index src0 = std::max<Eigen::Index>(0, pad - k);
    const Eigen::Index src1 = std::min<Eigen::Index>(t, t + pad - k);
    if (src0 >= src1) continue;
    out.block(src0, k * c, src1 - src0, c) = x.middleRows(src0 + k - pad, src1 - src0);
  }
  return unary(Op::kUnfold, a, std::move(out), kernel);
}

Var Graph::fold1d(Var a, int kernel) {
  require(kernel >= 1 && kernel % 2 == 1, "fold1d: kernel must be odd");
  const Mat& u = value(a);
  require(u.cols() % kernel == 0, "fold1d: column count not divisible by kernel");
  const Eigen::Index t = u.rows(), c = u.cols() / kernel;
  const Eigen::Index pad = (kernel - 1) / 2;
  Mat out = Mat::Zero(t, c);
  for (Eigen::Index k = 0; k < kernel; ++k) {
    const Eigen::Index src0 = std::max<Eigen::Index>(0, pad - k);
    const Eigen::Index src1 = std::min<Eigen::Index>(t, t + pad - k);
    if (src0 >= src1) continue;
    out.middleRows(src0 + k - pad, src1 - src0) += u.block(src0, k * c, src1 - src0, c);
  }
  return unary(Op::kFold, a, std::move(out), kernel);
}

Var Graph::downsample2x(Var a) {
  const Mat& x = value(a);
  require(x.rows() % 2 == 0, "downsample2x: row count must be even");
  const Eigen::Index t = x.rows() / 2;
  Mat out(t, x.cols());
  for (Eigen::Index i = 0; i < t; ++i)
    out.row(i) = 0.5 * (x.row(2 * i) + x.row(2 * i + 1));
  return unary(Op::kDown2, a, std::move(out));
}

Var Graph::upsample2x(Var a) {
  const Mat& x = value(a);
  Mat out(2 * x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out.row(2 * i) = x.row(i);
    out.row(2 * i + 1) = x.row(i);
  }
  return unary(Op::kUp2, a, std::move(out));
}

Var Graph::select_rows(Var a, std::vector<int> idx) {
  const Mat& x = value(a);
  Mat out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (size_t i = 0; i < idx.size(); ++i) {
    require(idx[i] >= 0 && idx[i] < x.rows(), "select_rows: index out of range");
    out.row(static_cast<Eigen::Index>(i)) = x.row(idx[i]);
  }
  Node n;
  n.op = Op::kSelectRows;
  n.a = a.id;
  n.idx = std::move(idx);
  n.val = std::move(out);
  n.grad = node(a).grad;
  return push(std::move(n));
}

Var Graph::scatter_rows(Var a, std::vector<int> idx, Eigen::Index total_rows) {
  const Mat& x = value(a);
  require(static_cast<Eigen::Index>(idx.size()) == x.rows(), "scatter_rows: index count mismatch");
  Mat out = Mat::Zero(total_rows, x.cols());
  for (size_t i = 0; i < idx.size(); ++i) {
    require(idx[i] >= 0 && idx[i] < total_rows, "scatter_rows: index out of range");
    out.row(idx[i]) += x.row(static_cast<Eigen::Index>(i));
  }
  Node n;
  n.op = Op::kScatterRows;
  n.a = a.id;
  n.i0 = total_rows;
  n.idx = std::move(idx);
  n.val = std::move(out);
  n.grad = node(a).grad;
  return push(std::move(n));
}

Var Graph::stop_grad(Var a) { return unary(Op::kStopGrad, a, value(a)); }

std::vector<Var> Graph::gradients(Var output, const std::vector<Var>& wrt) {
  check(output);
  require(value(output).size() == 1, "gradients: output must be scalar");
  for (Var w : wrt) check(w);

  // reaches[i]: node i depends (differentiably) on some wrt entry.
  std::vector<char> reaches(nodes_.size(), 0);
  for (Var w : wrt) reaches[static_cast<size_t>(w.id)] = 1;
  const int out_id = output.id;
  for (int i = 0; i <= out_id; ++i) {
    Node& n = nodes_[static_cast<size_t>(i)];
    if (reaches[static_cast<size_t>(i)]) continue;
    if (n.op == Op::kHeaviside || n.op == Op::kStopGrad) continue;
    bool hit = (n.a >= 0 && reaches[static_cast<size_t>(n.a)]) ||
               (n.b >= 0 && reaches[static_cast<size_t>(n.b)]);
    if (!hit && n.op == Op::kConcatRows) {
      for (int in : n.idx) hit = hit || reaches[static_cast<size_t>(in)];
    }
    reaches[static_cast<size_t>(i)] = hit;
  }

  std::vector<Var> adj(static_cast<size_t>(out_id) + 1);
  adj[static_cast<size_t>(out_id)] = constant(Mat::Ones(1, 1));

  auto accumulate = [&](int target, Var contribution) {
    if (target < 0 || !reaches[static_cast<size_t>(target)]) return;
    Var& slot = adj[static_cast<size_t>(target)];
    slot = slot.valid() ? add(slot, contribution) : contribution;
  };

  // Scalar fields copied out per node: creating adjoint nodes reallocates
  // the node vector, so references into it must not be held across ops.
  struct NodeRef {
    Op op;
    int a, b;
    Eigen::Index i0;
    double s;
    std::vector<int> idx;
  };

  for (int id = out_id; id >= 0; --id) {
    const Var g = adj[static_cast<size_t>(id)];
    if (!g.valid()) continue;
    NodeRef n;
    {
      const Node& stored = nodes_[static_cast<size_t>(id)];
      n.op = stored.op;
      n.a = stored.a;
      n.b = stored.b;
      n.i0 = stored.i0;
      n.s = stored.s;
      if (n.op == Op::kSelectRows || n.op == Op::kScatterRows || n.op == Op::kConcatRows)
        n.idx = stored.idx;
    }
    const Var a{n.a}, b{n.b};
    switch (n.op) {
      case Op::kConstant:
      case Op::kLeaf:
      case Op::kHeaviside:
        break;
      case Op::kAdd:
        accumulate(n.a, g);
        accumulate(n.b, g);
        break;
      case Op::kSub:
        accumulate(n.a, g);
        accumulate(n.b, neg(g));
        break;
      case Op::kNeg:
        accumulate(n.a, neg(g));
        break;
      case Op::kMul:
        accumulate(n.a, mul(g, b));
        accumulate(n.b, mul(g, a));
        break;
      case Op::kScalarMul:
        accumulate(n.a, scalar_mul(g, n.s));
        break;
      case Op::kMatMul:
        accumulate(n.a, matmul(g, transpose(b)));
        accumulate(n.b, matmul(transpose(a), g));
        break;
      case Op::kTranspose:
        accumulate(n.a, transpose(g));
        break;
      case Op::kRelu:
        accumulate(n.a, mul(g, heaviside(a)));
        break;
      case Op::kSigmoid: {
        const Var y{id};
        accumulate(n.a, mul(g, sub(y, mul(y, y))));
        break;
      }
      case Op::kTanh: {
        const Var y{id};
        accumulate(n.a, mul(g, sub(ones(value(y).rows(), value(y).cols()), mul(y, y))));
        break;
      }
      case Op::kExp:
        accumulate(n.a, mul(g, Var{id}));
        break;
      case Op::kLog:
        accumulate(n.a, mul(g, pow_const(a, -1.0)));
        break;
      case Op::kPowConst:
        accumulate(n.a, scalar_mul(mul(g, pow_const(a, n.s - 1.0)), n.s));
        break;
      case Op::kSumAll:
        accumulate(n.a, broadcast_scalar(g, value(a).rows(), value(a).cols()));
        break;
      case Op::kMeanAll:
        accumulate(n.a, scalar_mul(broadcast_scalar(g, value(a).rows(), value(a).cols()),
                                   1.0 / static_cast<double>(value(a).size())));
        break;
      case Op::kSumRows:
        accumulate(n.a, broadcast_rows(g, value(a).rows()));
        break;
      case Op::kMeanRows:
        accumulate(n.a, scalar_mul(broadcast_rows(g, value(a).rows()),
                                   1.0 / static_cast<double>(value(a).rows())));
        break;
      case Op::kBroadcastRows:
        accumulate(n.a, sum_rows(g));
        break;
      case Op::kBroadcastScalar:
        accumulate(n.a, sum_all(g));
        break;
      case Op::kConcatCols: {
        const Eigen::Index ca = value(a).cols();
        accumulate(n.a, slice_cols(g, 0, ca));
        accumulate(n.b, slice_cols(g, ca, ca + value(b).cols()));
        break;
      }
      case Op::kConcatRows: {
        Eigen::Index at = 0;
        for (int in : n.idx) {
          const Eigen::Index r = value(Var{in}).rows();
          accumulate(in, slice_rows(g, at, at + r));
          at += r;
        }
        break;
      }
      case Op::kSliceRows:
        accumulate(n.a, pad_rows(g, n.i0, value(a).rows()));
        break;
      case Op::kSliceCols:
        accumulate(n.a, pad_cols(g, n.i0, value(a).cols()));
        break;
      case Op::kPadRows:
        accumulate(n.a, slice_rows(g, n.i0, n.i0 + value(a).rows()));
        break;
      case Op::kPadCols:
        accumulate(n.a, slice_cols(g, n.i0, n.i0 + value(a).cols()));
        break;
      case Op::kUnfold:
        accumulate(n.a, fold1d(g, static_cast<int>(n.i0)));
        break;
      case Op::kFold:
        accumulate(n.a, unfold1d(g, static_cast<int>(n.i0)));
        break;
      case Op::kDown2:
        accumulate(n.a, scalar_mul(upsample2x(g), 0.5));
        break;
      case Op::kUp2:
        accumulate(n.a, scalar_mul(downsample2x(g), 2.0));
        break;
      case Op::kSelectRows:
        accumulate(n.a, scatter_rows(g, n.idx, value(a).rows()));
        break;
      case Op::kScatterRows:
        accumulate(n.a, select_rows(g, n.idx));
        break;
      case Op::kStopGrad:
        break;
    }
  }

  std::vector<Var> out;
  out.reserve(wrt.size());
  for (Var w : wrt) {
    const Var g = adj[static_cast<size_t>(w.id)];
    out.push_back(g.valid() ? g : zeros(value(w).rows(), value(w).cols()));
  }
  return out;
}

Var linear(Graph& g, Var x, Var W, Var b) {
  Var y = g.matmul(x, g.transpose(W));
  return g.add(y, g.broadcast_rows(b, g.rows(x)));
}

Var conv1d(Graph& g, Var x, Var W, Var b, int kernel) {
  return linear(g, g.unfold1d(x, kernel), W, b);
}

Var logsumexp_row(Graph& g, Var x) {
  // The shift is a constant built from the current value; the gradient of
  // the shifted expression equals the gradient of the raw one.
  const double m = g.value(x).maxCoeff();
  Var shifted = g.sub(x, g.constant(Mat::Constant(g.rows(x), g.cols(x), m)));
  return g.add(g.log_(g.sum_all(g.exp_(shifted))), g.scalar(m));
}

}  // namespace dvgan
