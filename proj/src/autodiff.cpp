// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#include "omega/autodiff.hpp"

namespace omega {

template <typename T>
void Node<T>::accumulate(const Tensor<T>& g) {
  if (g.shape() != value.shape()) {
    throw ShapeError("gradient shape " + shape_str(g.shape()) + " does not match value shape " +
                     shape_str(value.shape()));
  }
  if (!grad) {
    grad = g;
    return;
  }
  T* dst = grad->ptr();
  const T* src = g.ptr();
  for (std::size_t i = 0; i < g.numel(); ++i) dst[i] += src[i];
}

template <typename T>
void Node<T>::accumulate(Tensor<T>&& g) {
  if (!grad && g.shape() == value.shape()) {
    grad = std::move(g);
    return;
  }
  accumulate(static_cast<const Tensor<T>&>(g));
}

template <typename T>
Var<T> Tape<T>::leaf(Tensor<T> value, bool requires_grad) {
  auto node = std::make_shared<Node<T>>();
  node->value = std::move(value);
  node->requires_grad = requires_grad;
  node->tape = this;
  if (requires_grad) nodes_.push_back(node);
  return node;
}

template <typename T>
Var<T> Tape<T>::record(Tensor<T> value, std::initializer_list<const Var<T>*> inputs,
                       typename Node<T>::BackwardFn backward) {
  auto node = std::make_shared<Node<T>>();
  node->value = std::move(value);
  node->tape = this;
  node->is_leaf = false;
  for (const Var<T>* in : inputs) {
    if (*in && (*in)->requires_grad) node->requires_grad = true;
  }
  if (node->requires_grad) {
    node->backward = std::move(backward);
    nodes_.push_back(node);
  }
  return node;
}

template <typename T>
void Tape<T>::backward(const Var<T>& loss) {
  if (!loss) throw std::invalid_argument("backward: null loss");
  if (loss->value.numel() != 1) {
    throw ShapeError("backward requires a scalar loss, got shape " +
                     shape_str(loss->value.shape()));
  }
  if (!loss->requires_grad) return;
  loss->accumulate(Tensor<T>(loss->value.shape(), T{1}));
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    Node<T>& node = **it;
    if (node.is_leaf || !node.grad) continue;
    node.backward(node, *node.grad);
    node.grad.reset();
    // The closure holds the inputs alive; dropping it frees saved context.
    node.backward = nullptr;
  }
}

template <typename T>
Tensor<T> Tape<T>::grad(const Var<T>& v) const {
  if (v->grad) return *v->grad;
  return Tensor<T>(v->value.shape());
}

template struct Node<float>;
template struct Node<double>;
template class Tape<float>;
template class Tape<double>;

}  // namespace omega
