#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dfpv/numkit/dense_matrix.hpp"

namespace dfpv::numkit {

// Handle to a node recorded on a GradTape.
struct NodeRef {
  std::size_t index = 0;
  friend bool operator==(NodeRef, NodeRef) = default;
};

// Gradients of a scalar output, one matrix per registered parameter, in registration order.
class Gradients {
 public:
  Gradients() = default;
  Gradients(std::vector<NodeRef> params, std::vector<DenseMatrix> grads)
      : params_(std::move(params)), grads_(std::move(grads)) {}

  const DenseMatrix& of(NodeRef param) const;
  std::size_t size() const noexcept { return grads_.size(); }
  const std::vector<DenseMatrix>& all() const noexcept { return grads_; }

 private:
  std::vector<NodeRef> params_;
  std::vector<DenseMatrix> grads_;
};

// Eager reverse-mode tape over batched matrix values. Values are computed as nodes are
// recorded; backward() walks the nodes in reverse. Only the primitives the two-stage
// losses need are supported. A tape is single-threaded and is not reused across steps.
class GradTape {
 public:
  enum class Op {
    kParameter,
    kConstant,
    kAffine,          // X W^T + 1 b^T
    kRelu,
    kRowKron,         // row-wise Kronecker product
    kConstLeft,       // C X, C constant
    kConstRight,      // X C, C constant
    kSquaredError,    // scale * sum((X - T)^2) + offset, T constant; 1x1
    kAppendOnes,      // [X, 1]
  };

  NodeRef parameter(DenseMatrix value);
  NodeRef constant(DenseMatrix value);

  // x: n x in, weight: out x in, bias (optional): 1 x out.
  NodeRef affine(NodeRef x, NodeRef weight, std::optional<NodeRef> bias = std::nullopt);
  NodeRef relu(NodeRef x);
  NodeRef row_kron(NodeRef a, NodeRef b);
  NodeRef matmul_const_left(DenseMatrix c, NodeRef x);
  NodeRef matmul_const_right(NodeRef x, DenseMatrix c);
  // Appends a column of ones.
  NodeRef append_ones(NodeRef x);
  // scale * ||x - target||_F^2 + offset. `offset` carries terms that are constant on the tape.
  NodeRef squared_error(NodeRef x, DenseMatrix target, double scale = 1.0, double offset = 0.0);

  const DenseMatrix& value(NodeRef node) const;
  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<NodeRef>& parameters() const noexcept { return params_; }

  // d output / d p for every registered parameter p. `output` must be 1x1.
  Gradients backward(NodeRef output) const;

 private:
  struct Node {
    Op op;
    std::size_t lhs = 0;
    std::size_t rhs = 0;
    std::optional<std::size_t> extra;  // bias for affine
    DenseMatrix value;
    DenseMatrix payload;  // constant operand for kConstLeft/kConstRight/kSquaredError
    double scale = 1.0;
  };

  NodeRef push(Node node);
  const Node& node(NodeRef ref) const;

  std::vector<Node> nodes_;
  std::vector<NodeRef> params_;
};

}  // namespace dfpv::numkit
