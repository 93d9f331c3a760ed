#pragma once

#include <cmath>
#include <cstdint>

#include "smartbag/nn/network.hpp"

namespace smartbag::nn {

struct Hyperparams {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t batch_size = 128;
  std::size_t epochs = 10;
  double lambda = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

template <typename Scalar>
struct AdamState {
  std::uint64_t step = 0;
  LayerStack<Scalar> first;
  LayerStack<Scalar> second;

  static AdamState zeros_like(const LayerStack<Scalar>& params) {
    return {0, nn::zeros_like(params), nn::zeros_like(params)};
  }
};

/// One bias-corrected Adam update, in place. Increments state.step.
template <typename Scalar>
void adam_step(LayerStack<Scalar>& params, AdamState<Scalar>& state,
               const LayerStack<Scalar>& grads, const Hyperparams& hyper) {
  if (grads.size() != params.size() || state.first.size() != params.size() ||
      state.second.size() != params.size())
    throw std::invalid_argument("adam_step: layer count mismatch");
  for (std::size_t l = 0; l < params.size(); ++l) {
    const auto same = [](const auto& a, const auto& b) {
      return a.rows() == b.rows() && a.cols() == b.cols();
    };
    if (!same(grads[l].weights, params[l].weights) || !same(grads[l].bias, params[l].bias) ||
        !same(state.first[l].weights, params[l].weights) ||
        !same(state.second[l].weights, params[l].weights) ||
        !same(state.first[l].bias, params[l].bias) || !same(state.second[l].bias, params[l].bias))
      throw std::invalid_argument("adam_step: shape mismatch");
  }

  ++state.step;
  const Scalar b1(hyper.beta1), b2(hyper.beta2), lr(hyper.learning_rate), eps(hyper.epsilon);
  const Scalar c1 = Scalar(1) - std::pow(b1, static_cast<Scalar>(state.step));
  const Scalar c2 = Scalar(1) - std::pow(b2, static_cast<Scalar>(state.step));

  auto update = [&](auto& theta, auto& m, auto& v, const auto& g) {
    m = b1 * m + (Scalar(1) - b1) * g;
    v = b2 * v + (Scalar(1) - b2) * g.cwiseAbs2();
    theta.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (std::size_t l = 0; l < params.size(); ++l) {
    update(params[l].weights, state.first[l].weights, state.second[l].weights, grads[l].weights);
    update(params[l].bias, state.first[l].bias, state.second[l].bias, grads[l].bias);
  }
}

}  // namespace smartbag::nn
