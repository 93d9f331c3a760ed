#pragma once

#include <optional>
#include <vector>

#include "smartbag/data/dataset.hpp"
#include "smartbag/nn/adam.hpp"
#include "smartbag/nn/network.hpp"

namespace smartbag::nn {

/// A trained classifier: layer parameters plus the normalizer applied to raw
/// features before the first layer. Immutable once trained.
struct ModelParams {
  LayerStack<double> layers;
  data::Normalizer normalizer;

  ModelSpec spec() const { return spec_of(layers); }
  /// Shapes chain, entries finite, normalizer width matches, stddevs > 0.
  void validate() const;

  /// All-zero weights and an identity normalizer.
  static ModelParams zeros(const ModelSpec& spec);
};

struct Prediction {
  std::size_t class_index = 0;
  Eigen::VectorXd probabilities;
};

/// Normalizes raw features, runs the network, takes the argmax (lowest index on ties).
Prediction predict(const ModelParams& model, const Eigen::VectorXd& raw_features);

/// Rows are true classes, columns predicted classes.
using ConfusionMatrix = Eigen::Matrix<std::size_t, Eigen::Dynamic, Eigen::Dynamic>;

struct Evaluation {
  double accuracy = 0.0;
  ConfusionMatrix confusion;

  /// Diagonal over row sum; NaN for a class with no samples.
  std::vector<double> recall() const;
};

Evaluation evaluate(const ModelParams& model, const data::Dataset& dataset);

struct TrainReport {
  std::vector<double> epoch_loss;
  double train_accuracy = 0.0;
  std::optional<double> test_accuracy;
  /// On the test set when one was given, otherwise on the training set.
  ConfusionMatrix confusion;
};

struct TrainResult {
  ModelParams model;
  TrainReport report;
};

/// Mini-batch Adam on the (internally normalized) training set. Each epoch
/// reshuffles with a generator seeded from hyper.seed; the final partial
/// batch is trained. Deterministic in (train_set, spec, hyper).
TrainResult train(const data::Dataset& train_set, const ModelSpec& spec, const Hyperparams& hyper,
                  const data::Dataset* test_set = nullptr);

}  // namespace smartbag::nn
