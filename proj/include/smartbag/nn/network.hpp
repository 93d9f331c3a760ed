#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "smartbag/nn/activations.hpp"

namespace smartbag::nn {

/// Layer widths from input to output. Hidden layers are ReLU, the output is softmax.
struct ModelSpec {
  std::vector<std::size_t> layer_sizes;

  /// [13, 15, 20, 25, 30, 60, 5]
  static ModelSpec default_spec();

  std::size_t input_width() const { return layer_sizes.front(); }
  std::size_t output_width() const { return layer_sizes.back(); }
  /// Number of weight matrices.
  std::size_t depth() const { return layer_sizes.size() - 1; }

  /// Throws std::invalid_argument unless there are >= 3 sizes, all >= 1.
  void validate() const;

  bool operator==(const ModelSpec&) const = default;
};

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// One affine map: weights are (fan_out x fan_in).
template <typename Scalar>
struct DenseLayer {
  Matrix<Scalar> weights;
  Vector<Scalar> bias;

  bool operator==(const DenseLayer& o) const {
    return weights.rows() == o.weights.rows() && weights.cols() == o.weights.cols() &&
           weights == o.weights && bias.size() == o.bias.size() && bias == o.bias;
  }
};

/// Parameters (or anything shaped like them: gradients, optimizer moments).
template <typename Scalar>
using LayerStack = std::vector<DenseLayer<Scalar>>;

template <typename Scalar>
LayerStack<Scalar> zeros_like(const LayerStack<Scalar>& layers) {
  LayerStack<Scalar> out;
  out.reserve(layers.size());
  for (const auto& l : layers)
    out.push_back({Matrix<Scalar>::Zero(l.weights.rows(), l.weights.cols()),
                   Vector<Scalar>::Zero(l.bias.size())});
  return out;
}

template <typename Scalar>
LayerStack<Scalar> zero_layers(const ModelSpec& spec) {
  spec.validate();
  LayerStack<Scalar> out;
  for (std::size_t l = 0; l < spec.depth(); ++l) {
    const auto in = static_cast<Eigen::Index>(spec.layer_sizes[l]);
    const auto fan_out = static_cast<Eigen::Index>(spec.layer_sizes[l + 1]);
    out.push_back({Matrix<Scalar>::Zero(fan_out, in), Vector<Scalar>::Zero(fan_out)});
  }
  return out;
}

/// He-uniform weights U(-sqrt(6/fan_in), sqrt(6/fan_in)), zero biases.
LayerStack<double> he_uniform_layers(const ModelSpec& spec, std::uint64_t seed);

template <typename Scalar>
ModelSpec spec_of(const LayerStack<Scalar>& layers) {
  if (layers.empty()) throw std::invalid_argument("spec_of: no layers");
  ModelSpec spec;
  spec.layer_sizes.push_back(static_cast<std::size_t>(layers.front().weights.cols()));
  for (const auto& l : layers) spec.layer_sizes.push_back(static_cast<std::size_t>(l.weights.rows()));
  return spec;
}

/// Throws unless consecutive layers chain.
template <typename Scalar>
void check_shapes(const LayerStack<Scalar>& layers) {
  if (layers.empty()) throw std::invalid_argument("network: no layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.bias.size() != layer.weights.rows())
      throw std::invalid_argument("network: bias length does not match layer width");
    if (l > 0 && layer.weights.cols() != layers[l - 1].weights.rows())
      throw std::invalid_argument("network: layer widths do not chain");
  }
}

/// Inputs and one-hot targets, one sample per column.
template <typename Scalar>
struct Batch {
  Matrix<Scalar> inputs;
  Matrix<Scalar> targets;

  Eigen::Index size() const { return inputs.cols(); }
};

template <typename Scalar>
Batch<Scalar> make_batch(const Matrix<Scalar>& inputs, const std::vector<std::size_t>& labels,
                         std::size_t classes) {
  if (static_cast<std::size_t>(inputs.cols()) != labels.size())
    throw std::invalid_argument("make_batch: label count mismatch");
  Batch<Scalar> b{inputs, Matrix<Scalar>::Zero(static_cast<Eigen::Index>(classes), inputs.cols())};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= classes) throw std::invalid_argument("make_batch: label out of range");
    b.targets(static_cast<Eigen::Index>(labels[i]), static_cast<Eigen::Index>(i)) = Scalar(1);
  }
  return b;
}

/// Activations of every layer for a batch; activations[0] is the input and
/// activations.back() the softmax output. pre[l] is the pre-activation of layer l+1.
template <typename Scalar>
struct ForwardTrace {
  std::vector<Matrix<Scalar>> pre;
  std::vector<Matrix<Scalar>> activations;
};

template <typename Scalar>
ForwardTrace<Scalar> forward_batch(const LayerStack<Scalar>& layers, const Matrix<Scalar>& inputs) {
  check_shapes(layers);
  if (inputs.rows() != layers.front().weights.cols())
    throw std::invalid_argument("forward: input width does not match network");

  ForwardTrace<Scalar> trace;
  trace.activations.push_back(inputs);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Matrix<Scalar> z = (layers[l].weights * trace.activations.back()).colwise() + layers[l].bias;
    trace.activations.push_back(l + 1 == layers.size() ? softmax(z) : relu(z));
    trace.pre.push_back(std::move(z));
  }
  return trace;
}

/// Per-layer activations for one input, ending in the probability vector.
template <typename Scalar>
std::vector<Vector<Scalar>> forward(const LayerStack<Scalar>& layers, const Vector<Scalar>& x) {
  auto trace = forward_batch(layers, Matrix<Scalar>(x));
  std::vector<Vector<Scalar>> out;
  out.reserve(trace.activations.size());
  for (auto& a : trace.activations) out.emplace_back(a.col(0));
  return out;
}

/// Clamp bound applied to every probability inside a logarithm.
inline constexpr double kLogClamp = 1e-12;

template <typename Scalar>
struct Objective {
  Scalar loss;
  LayerStack<Scalar> gradients;
};

namespace detail {

template <typename Scalar>
void check_batch(const LayerStack<Scalar>& layers, const Batch<Scalar>& batch) {
  if (batch.size() == 0) throw std::invalid_argument("loss: empty batch");
  if (batch.targets.cols() != batch.inputs.cols())
    throw std::invalid_argument("loss: target count does not match input count");
  if (batch.targets.rows() != layers.back().weights.rows())
    throw std::invalid_argument("loss: target width does not match output width");
  for (Eigen::Index c = 0; c < batch.targets.cols(); ++c) {
    const auto col = batch.targets.col(c);
    const bool binary = ((col.array() == Scalar(0)) || (col.array() == Scalar(1))).all();
    if (!binary || col.sum() != Scalar(1))
      throw std::invalid_argument("loss: target column is not one-hot");
  }
}

template <typename Scalar>
Scalar weight_penalty(const LayerStack<Scalar>& layers) {
  Scalar s(0);
  for (const auto& l : layers) s += l.weights.squaredNorm();
  return s;
}

}  // namespace detail

/// Binary cross-entropy summed over every output unit, averaged over the
/// batch, plus (lambda / 2m) * sum of squared weights (biases not penalized).
/// With want_gradient, also the exact gradient of that value.
template <typename Scalar>
Objective<Scalar> objective(const LayerStack<Scalar>& layers, const Batch<Scalar>& batch,
                            Scalar lambda, bool want_gradient = true) {
  if (lambda < Scalar(0)) throw std::invalid_argument("loss: lambda must be >= 0");
  check_shapes(layers);
  detail::check_batch(layers, batch);

  const auto trace = forward_batch(layers, batch.inputs);
  const Matrix<Scalar>& h = trace.activations.back();
  const Matrix<Scalar>& y = batch.targets;
  const Scalar m = static_cast<Scalar>(batch.size());
  const Scalar lo(kLogClamp), hi(Scalar(1) - Scalar(kLogClamp));

  Scalar cross_entropy(0);
  Matrix<Scalar> dh(h.rows(), h.cols());
  for (Eigen::Index c = 0; c < h.cols(); ++c) {
    for (Eigen::Index k = 0; k < h.rows(); ++k) {
      const Scalar p = h(k, c);
      const Scalar clamped = std::clamp(p, lo, hi);
      const bool inside = p >= lo && p <= hi;
      cross_entropy += y(k, c) * std::log(clamped) + (Scalar(1) - y(k, c)) * std::log(Scalar(1) - clamped);
      dh(k, c) = inside ? -(y(k, c) / p - (Scalar(1) - y(k, c)) / (Scalar(1) - p)) / m : Scalar(0);
    }
  }

  Objective<Scalar> out;
  out.loss = -cross_entropy / m + lambda / (Scalar(2) * m) * detail::weight_penalty(layers);
  if (!want_gradient) return out;

  // Softmax Jacobian-vector product, column by column.
  Matrix<Scalar> delta =
      h.array() * (dh.rowwise() - (h.array() * dh.array()).colwise().sum().matrix()).array();

  out.gradients.resize(layers.size());
  for (std::size_t l = layers.size(); l-- > 0;) {
    auto& g = out.gradients[l];
    g.weights = delta * trace.activations[l].transpose() + (lambda / m) * layers[l].weights;
    g.bias = delta.rowwise().sum();
    if (l > 0) {
      Matrix<Scalar> upstream = layers[l].weights.transpose() * delta;
      delta = (trace.pre[l - 1].array() > Scalar(0)).select(upstream, Scalar(0));
    }
  }
  return out;
}

template <typename Scalar>
Scalar loss(const LayerStack<Scalar>& layers, const Batch<Scalar>& batch, Scalar lambda) {
  return objective(layers, batch, lambda, false).loss;
}

template <typename Scalar>
LayerStack<Scalar> backward(const LayerStack<Scalar>& layers, const Batch<Scalar>& batch,
                            Scalar lambda) {
  return objective(layers, batch, lambda, true).gradients;
}

}  // namespace smartbag::nn
