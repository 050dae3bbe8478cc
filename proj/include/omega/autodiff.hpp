// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
//
// Define-by-run reverse-mode differentiation. Every differentiable op appends
// a node to the Tape that produced its inputs; backward() walks the tape in
// reverse creation order, which is a valid reverse topological order.
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "omega/tensor.hpp"

namespace omega {

template <typename T>
class Tape;

template <typename T>
struct Node {
  // Receives the node itself (for its saved output value) and dLoss/dOutput.
  using BackwardFn = std::function<void(const Node& self, const Tensor<T>& grad_out)>;

  Tensor<T> value;
  std::optional<Tensor<T>> grad;
  bool requires_grad = false;
  bool is_leaf = true;
  BackwardFn backward;
  Tape<T>* tape = nullptr;

  /// Adds g into this node's gradient, allocating it on first use.
  void accumulate(const Tensor<T>& g);
  void accumulate(Tensor<T>&& g);
};

/// Handle to a recorded value. Copies share the node.
template <typename T>
using Var = std::shared_ptr<Node<T>>;

template <typename T>
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var<T> leaf(Tensor<T> value, bool requires_grad = false);

  /// Creates the output node of an op. The backward rule is kept only when
  /// at least one input needs a gradient; otherwise the node is detached and
  /// intermediate values are freed as soon as their handles drop.
  Var<T> record(Tensor<T> value, std::initializer_list<const Var<T>*> inputs,
                typename Node<T>::BackwardFn backward);

  /// Reverse pass from a single-element loss. Gradients accumulate
  /// additively across fan-out. Intermediate (non-leaf) gradients are
  /// released once propagated.
  void backward(const Var<T>& loss);

  /// Gradient of a leaf after backward(); zeros when the loss did not depend on it.
  Tensor<T> grad(const Var<T>& v) const;

  std::size_t size() const noexcept { return nodes_.size(); }
  void clear() { nodes_.clear(); }

 private:
  std::vector<Var<T>> nodes_;
};

extern template class Tape<float>;
extern template class Tape<double>;
extern template struct Node<float>;
extern template struct Node<double>;

}  // namespace omega
