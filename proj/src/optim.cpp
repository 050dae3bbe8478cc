// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#include "omega/optim.hpp"

#include <cmath>
#include <string>

namespace omega::train {

void AdamConfig::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument("adam config: " + m); };
  if (!(lr > 0)) fail("lr must be > 0");
  if (!(beta1 >= 0 && beta1 < 1)) fail("beta1 must lie in [0, 1)");
  if (!(beta2 >= 0 && beta2 < 1)) fail("beta2 must lie in [0, 1)");
  if (!(eps > 0)) fail("eps must be > 0");
  if (!(weight_decay >= 0)) fail("weight_decay must be >= 0");
}

template <typename T>
AdamState<T> AdamState<T>::zeros(const ParameterSet<T>& params, AdamConfig config) {
  AdamState<T> s;
  s.config = config;
  for (const auto& p : params) {
    s.m.emplace_back(p.value.shape());
    s.v.emplace_back(p.value.shape());
  }
  return s;
}

template <typename T>
void adam_step(ParameterSet<T>& params, const std::vector<Tensor<T>>& grads, AdamState<T>& state) {
  if (grads.size() != params.size() || state.m.size() != params.size()) {
    throw std::invalid_argument("adam_step: gradient/state count does not match parameters");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads[i].shape() != params[i].value.shape()) {
      throw ShapeError("adam_step: gradient for " + params[i].name + " has shape " +
                       shape_str(grads[i].shape()));
    }
    if (!grads[i].all_finite()) {
      throw NonFiniteGradient("adam_step: non-finite gradient for " + params[i].name);
    }
  }
  const AdamConfig& c = state.config;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const T bc1 = static_cast<T>(1.0 - std::pow(c.beta1, t));
  const T bc2 = static_cast<T>(1.0 - std::pow(c.beta2, t));
  const T b1 = static_cast<T>(c.beta1), b2 = static_cast<T>(c.beta2);
  const T lr = static_cast<T>(c.lr), eps = static_cast<T>(c.eps), wd = static_cast<T>(c.weight_decay);
  for (std::size_t i = 0; i < params.size(); ++i) {
    T* w = params[i].value.ptr();
    T* m = state.m[i].ptr();
    T* v = state.v[i].ptr();
    const T* g = grads[i].ptr();
    for (std::size_t q = 0; q < grads[i].numel(); ++q) {
      const T gq = g[q] + wd * w[q];
      m[q] = b1 * m[q] + (T{1} - b1) * gq;
      v[q] = b2 * v[q] + (T{1} - b2) * gq * gq;
      const T mhat = m[q] / bc1;
      const T vhat = v[q] / bc2;
      w[q] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step<float>(ParameterSet<float>&, const std::vector<Tensor<float>>&, AdamState<float>&);
template void adam_step<double>(ParameterSet<double>&, const std::vector<Tensor<double>>&,
                                AdamState<double>&);

}  // namespace omega::train
