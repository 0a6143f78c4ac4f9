#include "dfpv/numkit/grad_tape.hpp"

#include <string>

#include "dfpv/errors.hpp"
#include "dfpv/numkit/linalg.hpp"

namespace dfpv::numkit {

namespace {

void accumulate(DenseMatrix& into, const DenseMatrix& delta) {
  if (into.empty() && into.rows() == 0) {
    into = delta;
    return;
  }
  auto o = into.data();
  auto d = delta.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += d[i];
}

}  // namespace

const DenseMatrix& Gradients::of(NodeRef param) const {
  for (std::size_t k = 0; k < params_.size(); ++k)
    if (params_[k] == param) return grads_[k];
  throw InvalidArgument("Gradients::of: node " + std::to_string(param.index) + " is not a parameter");
}

NodeRef GradTape::push(Node n) {
  nodes_.push_back(std::move(n));
  return NodeRef{nodes_.size() - 1};
}

const GradTape::Node& GradTape::node(NodeRef ref) const {
  if (ref.index >= nodes_.size()) throw InvalidArgument("GradTape: dangling node reference");
  return nodes_[ref.index];
}

const DenseMatrix& GradTape::value(NodeRef ref) const { return node(ref).value; }

NodeRef GradTape::parameter(DenseMatrix value) {
  Node n{Op::kParameter};
  n.value = std::move(value);
  NodeRef ref = push(std::move(n));
  params_.push_back(ref);
  return ref;
}

NodeRef GradTape::constant(DenseMatrix value) {
  Node n{Op::kConstant};
  n.value = std::move(value);
  return push(std::move(n));
}

NodeRef GradTape::affine(NodeRef x, NodeRef weight, std::optional<NodeRef> bias) {
  const DenseMatrix& xv = value(x);
  const DenseMatrix& wv = value(weight);
  if (xv.cols() != wv.cols()) {
    throw InvalidArgument("GradTape::affine: input has " + std::to_string(xv.cols()) +
                          " columns, weight expects " + std::to_string(wv.cols()));
  }
  Node n{Op::kAffine, x.index, weight.index};
  n.value = matmul_nt(xv, wv);
  if (bias) {
    const DenseMatrix& bv = value(*bias);
    if (bv.rows() != 1 || bv.cols() != wv.rows())
      throw InvalidArgument("GradTape::affine: bias must be 1 x out");
    for (std::size_t r = 0; r < n.value.rows(); ++r) {
      auto row = n.value.row(r);
      for (std::size_t j = 0; j < row.size(); ++j) row[j] += bv(0, j);
    }
    n.extra = bias->index;
  }
  return push(std::move(n));
}

NodeRef GradTape::relu(NodeRef x) {
  Node n{Op::kRelu, x.index};
  n.value = value(x);
  for (double& v : n.value.data()) v = v > 0.0 ? v : 0.0;
  return push(std::move(n));
}

NodeRef GradTape::row_kron(NodeRef a, NodeRef b) {
  Node n{Op::kRowKron, a.index, b.index};
  n.value = numkit::row_kron(value(a), value(b));
  return push(std::move(n));
}

NodeRef GradTape::matmul_const_left(DenseMatrix c, NodeRef x) {
  Node n{Op::kConstLeft, x.index};
  n.value = matmul(c, value(x));
  n.payload = std::move(c);
  return push(std::move(n));
}

NodeRef GradTape::matmul_const_right(NodeRef x, DenseMatrix c) {
  Node n{Op::kConstRight, x.index};
  n.value = matmul(value(x), c);
  n.payload = std::move(c);
  return push(std::move(n));
}

NodeRef GradTape::append_ones(NodeRef x) {
  const DenseMatrix& xv = value(x);
  Node n{Op::kAppendOnes, x.index};
  n.value = DenseMatrix(xv.rows(), xv.cols() + 1, 1.0);
  for (std::size_t i = 0; i < xv.rows(); ++i) std::copy(xv.row(i).begin(), xv.row(i).end(), n.value.row(i).begin());
  return push(std::move(n));
}

NodeRef GradTape::squared_error(NodeRef x, DenseMatrix target, double scale, double offset) {
  const DenseMatrix& xv = value(x);
  if (xv.rows() != target.rows() || xv.cols() != target.cols())
    throw InvalidArgument("GradTape::squared_error: target shape mismatch");
  double s = 0.0;
  auto xd = xv.data();
  auto td = target.data();
  for (std::size_t i = 0; i < xd.size(); ++i) {
    const double d = xd[i] - td[i];
    s += d * d;
  }
  Node n{Op::kSquaredError, x.index};
  n.value = DenseMatrix(1, 1, scale * s + offset);
  n.payload = std::move(target);
  n.scale = scale;
  return push(std::move(n));
}

Gradients GradTape::backward(NodeRef output) const {
  const Node& out = node(output);
  if (out.value.rows() != 1 || out.value.cols() != 1) {
    throw InvalidArgument("GradTape::backward: output is " + std::to_string(out.value.rows()) + "x" +
                          std::to_string(out.value.cols()) + ", expected a scalar");
  }

  std::vector<DenseMatrix> adj(output.index + 1);
  adj[output.index] = DenseMatrix(1, 1, 1.0);

  for (std::size_t k = output.index + 1; k-- > 0;) {
    const DenseMatrix& g = adj[k];
    if (g.rows() == 0) continue;
    const Node& n = nodes_[k];
    switch (n.op) {
      case Op::kParameter:
      case Op::kConstant:
        break;
      case Op::kAffine: {
        const DenseMatrix& xv = nodes_[n.lhs].value;
        const DenseMatrix& wv = nodes_[n.rhs].value;
        accumulate(adj[n.lhs], matmul(g, wv));
        accumulate(adj[n.rhs], matmul_tn(g, xv));
        if (n.extra) {
          DenseMatrix db(1, g.cols());
          for (std::size_t r = 0; r < g.rows(); ++r)
            for (std::size_t j = 0; j < g.cols(); ++j) db(0, j) += g(r, j);
          accumulate(adj[*n.extra], db);
        }
        break;
      }
      case Op::kRelu: {
        const DenseMatrix& xv = nodes_[n.lhs].value;
        DenseMatrix dx = g;
        auto d = dx.data();
        auto xd = xv.data();
        for (std::size_t i = 0; i < d.size(); ++i)
          if (!(xd[i] > 0.0)) d[i] = 0.0;
        accumulate(adj[n.lhs], dx);
        break;
      }
      case Op::kRowKron: {
        const DenseMatrix& av = nodes_[n.lhs].value;
        const DenseMatrix& bv = nodes_[n.rhs].value;
        const std::size_t da = av.cols();
        const std::size_t db = bv.cols();
        DenseMatrix ga(av.rows(), da);
        DenseMatrix gb(bv.rows(), db);
        for (std::size_t r = 0; r < av.rows(); ++r) {
          auto gr = g.row(r);
          auto ar = av.row(r);
          auto br = bv.row(r);
          auto gar = ga.row(r);
          auto gbr = gb.row(r);
          for (std::size_t i = 0; i < da; ++i) {
            const double* gi = gr.data() + i * db;
            double s = 0.0;
            for (std::size_t j = 0; j < db; ++j) {
              s += gi[j] * br[j];
              gbr[j] += gi[j] * ar[i];
            }
            gar[i] = s;
          }
        }
        accumulate(adj[n.lhs], ga);
        accumulate(adj[n.rhs], gb);
        break;
      }
      case Op::kConstLeft:
        accumulate(adj[n.lhs], matmul_tn(n.payload, g));
        break;
      case Op::kConstRight:
        accumulate(adj[n.lhs], matmul_nt(g, n.payload));
        break;
      case Op::kAppendOnes: {
        DenseMatrix dx(g.rows(), g.cols() - 1);
        for (std::size_t i = 0; i < g.rows(); ++i)
          std::copy(g.row(i).begin(), g.row(i).end() - 1, dx.row(i).begin());
        accumulate(adj[n.lhs], dx);
        break;
      }
      case Op::kSquaredError: {
        const DenseMatrix& xv = nodes_[n.lhs].value;
        DenseMatrix dx(xv.rows(), xv.cols());
        const double c = 2.0 * n.scale * g(0, 0);
        auto d = dx.data();
        auto xd = xv.data();
        auto td = n.payload.data();
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = c * (xd[i] - td[i]);
        accumulate(adj[n.lhs], dx);
        break;
      }
    }
  }

  std::vector<DenseMatrix> grads;
  grads.reserve(params_.size());
  for (NodeRef p : params_) {
    const DenseMatrix& pv = nodes_[p.index].value;
    if (p.index <= output.index && adj[p.index].rows() != 0) {
      grads.push_back(std::move(adj[p.index]));
    } else {
      grads.emplace_back(pv.rows(), pv.cols(), 0.0);
    }
  }
  return Gradients(params_, std::move(grads));
}

}  // namespace dfpv::numkit
