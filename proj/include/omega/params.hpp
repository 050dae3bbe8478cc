// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "omega/autodiff.hpp"

namespace omega {

template <typename T>
struct NamedTensor {
  std::string name;
  Tensor<T> value;
};

/// Ordered, uniquely named parameter tensors.
template <typename T>
class ParameterSet {
 public:
  void add(std::string name, Tensor<T> value) {
    if (name.empty()) throw std::invalid_argument("parameter name must be non-empty");
    if (index_.contains(name)) throw std::invalid_argument("duplicate parameter name: " + name);
    index_.emplace(name, entries_.size());
    entries_.push_back({std::move(name), std::move(value)});
  }

  std::size_t size() const noexcept { return entries_.size(); }
  const NamedTensor<T>& operator[](std::size_t i) const { return entries_[i]; }
  NamedTensor<T>& operator[](std::size_t i) { return entries_[i]; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }

  bool contains(const std::string& name) const { return index_.contains(name); }
  std::size_t index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::out_of_range("unknown parameter: " + name);
    return it->second;
  }
  const Tensor<T>& at(const std::string& name) const { return entries_[index_of(name)].value; }
  Tensor<T>& at(const std::string& name) { return entries_[index_of(name)].value; }

  std::size_t total_elements() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.value.numel();
    return n;
  }

  template <typename U>
  ParameterSet<U> cast() const {
    ParameterSet<U> out;
    for (const auto& e : entries_) out.add(e.name, e.value.template cast<U>());
    return out;
  }

 private:
  std::vector<NamedTensor<T>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Parameters lifted onto a tape for one forward pass.
template <typename T>
class Binding {
 public:
  Binding(const ParameterSet<T>& params, Tape<T>& tape, bool requires_grad) : params_(&params) {
    vars_.reserve(params.size());
    for (const auto& e : params) vars_.push_back(tape.leaf(e.value, requires_grad));
  }

  const Var<T>& get(const std::string& name) const { return vars_[params_->index_of(name)]; }
  const Var<T>& operator[](std::size_t i) const { return vars_[i]; }
  std::size_t size() const noexcept { return vars_.size(); }

  /// Gradients in parameter order, after Tape::backward.
  std::vector<Tensor<T>> gradients(const Tape<T>& tape) const {
    std::vector<Tensor<T>> out;
    out.reserve(vars_.size());
    for (const auto& v : vars_) out.push_back(tape.grad(v));
    return out;
  }

 private:
  const ParameterSet<T>* params_;
  std::vector<Var<T>> vars_;
};

}  // namespace omega
