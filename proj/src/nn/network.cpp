#include <random>

#include "smartbag/nn/adam.hpp"
#include "smartbag/nn/model.hpp"

namespace smartbag::nn {

ModelSpec ModelSpec::default_spec() { return {{13, 15, 20, 25, 30, 60, 5}}; }

void ModelSpec::validate() const {
  if (layer_sizes.size() < 3)
    throw std::invalid_argument("model spec: need input, at least one hidden, and output layer");
  for (auto s : layer_sizes)
    if (s == 0) throw std::invalid_argument("model spec: layer sizes must be >= 1");
}

LayerStack<double> he_uniform_layers(const ModelSpec& spec, std::uint64_t seed) {
  auto layers = zero_layers<double>(spec);
  std::mt19937_64 rng(seed);
  for (auto& layer : layers) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.weights.cols()));
    std::uniform_real_distribution<double> draw(-limit, limit);
    for (Eigen::Index c = 0; c < layer.weights.cols(); ++c)
      for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) layer.weights(r, c) = draw(rng);
  }
  return layers;
}

void Hyperparams::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("hyperparams: learning rate must be > 0");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0))
    throw std::invalid_argument("hyperparams: betas must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw std::invalid_argument("hyperparams: epsilon must be > 0");
  if (batch_size == 0) throw std::invalid_argument("hyperparams: batch size must be >= 1");
  if (epochs == 0) throw std::invalid_argument("hyperparams: epochs must be >= 1");
  if (!(lambda >= 0.0)) throw std::invalid_argument("hyperparams: lambda must be >= 0");
}

void ModelParams::validate() const {
  check_shapes(layers);
  for (const auto& l : layers)
    if (!l.weights.allFinite() || !l.bias.allFinite())
      throw std::invalid_argument("model: non-finite parameter");
  const auto width = layers.front().weights.cols();
  if (normalizer.mean.size() != width || normalizer.stddev.size() != width)
    throw std::invalid_argument("model: normalizer width does not match input width");
  if (!normalizer.mean.allFinite() || !(normalizer.stddev.array() > 0.0).all() ||
      !normalizer.stddev.allFinite())
    throw std::invalid_argument("model: normalizer stddev must be finite and > 0");
}

ModelParams ModelParams::zeros(const ModelSpec& spec) {
  return {zero_layers<double>(spec), data::Normalizer::identity(spec.input_width())};
}

}  // namespace smartbag::nn
