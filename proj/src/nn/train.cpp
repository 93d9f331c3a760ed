#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "smartbag/nn/model.hpp"

namespace smartbag::nn {
namespace {

std::size_t argmax(const Eigen::Ref<const Eigen::VectorXd>& p) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < p.size(); ++i)
    if (p[i] > p[static_cast<Eigen::Index>(best)]) best = static_cast<std::size_t>(i);
  return best;
}

}  // namespace

Prediction predict(const ModelParams& model, const Eigen::VectorXd& raw_features) {
  if (raw_features.size() != model.layers.front().weights.cols())
    throw std::invalid_argument("predict: feature width does not match model");
  const Eigen::VectorXd x = model.normalizer.apply(raw_features);
  Prediction out;
  out.probabilities = forward(model.layers, x).back();
  out.class_index = argmax(out.probabilities);
  return out;
}

std::vector<double> Evaluation::recall() const {
  std::vector<double> out;
  for (Eigen::Index r = 0; r < confusion.rows(); ++r) {
    const auto total = confusion.row(r).sum();
    out.push_back(total == 0 ? std::numeric_limits<double>::quiet_NaN()
                             : static_cast<double>(confusion(r, r)) / static_cast<double>(total));
  }
  return out;
}

Evaluation evaluate(const ModelParams& model, const data::Dataset& dataset) {
  if (dataset.empty()) throw std::invalid_argument("evaluate: empty dataset");
  if (dataset.feature_count() != static_cast<std::size_t>(model.layers.front().weights.cols()))
    throw std::invalid_argument("evaluate: feature width does not match model");
  const auto k = static_cast<Eigen::Index>(model.layers.back().weights.rows());
  if (static_cast<Eigen::Index>(dataset.vocabulary().size()) != k)
    throw std::invalid_argument("evaluate: class count does not match model");

  const Eigen::MatrixXd probs =
      forward_batch(model.layers, model.normalizer.apply(dataset.feature_matrix())).activations.back();

  Evaluation out;
  out.confusion = ConfusionMatrix::Zero(k, k);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto truth = dataset[i].label;
    const auto guess = argmax(probs.col(static_cast<Eigen::Index>(i)));
    ++out.confusion(static_cast<Eigen::Index>(truth), static_cast<Eigen::Index>(guess));
    if (truth == guess) ++correct;
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(dataset.size());
  return out;
}

TrainResult train(const data::Dataset& train_set, const ModelSpec& spec, const Hyperparams& hyper,
                  const data::Dataset* test_set) {
  spec.validate();
  hyper.validate();
  if (train_set.empty()) throw std::invalid_argument("train: empty dataset");
  if (train_set.feature_count() != spec.input_width())
    throw std::invalid_argument("train: feature width does not match model input width");
  if (train_set.vocabulary().size() != spec.output_width())
    throw std::invalid_argument("train: class count does not match model output width");

  TrainResult result;
  ModelParams& model = result.model;
  model.normalizer = data::fit_normalizer(train_set);
  model.layers = he_uniform_layers(spec, hyper.seed);

  const Eigen::MatrixXd inputs = model.normalizer.apply(train_set.feature_matrix());
  const auto full = make_batch<double>(inputs, train_set.labels(), spec.output_width());

  auto state = AdamState<double>::zeros_like(model.layers);
  std::seed_seq shuffle_seed{hyper.seed, std::uint64_t{0x5eed}};
  std::mt19937_64 rng(shuffle_seed);

  const std::size_t n = train_set.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += hyper.batch_size) {
      const std::size_t count = std::min(hyper.batch_size, n - start);
      Batch<double> batch{Eigen::MatrixXd(inputs.rows(), count),
                          Eigen::MatrixXd(full.targets.rows(), count)};
      for (std::size_t j = 0; j < count; ++j) {
        const auto src = static_cast<Eigen::Index>(order[start + j]);
        batch.inputs.col(static_cast<Eigen::Index>(j)) = inputs.col(src);
        batch.targets.col(static_cast<Eigen::Index>(j)) = full.targets.col(src);
      }
      const auto step = objective(model.layers, batch, hyper.lambda);
      adam_step(model.layers, state, step.gradients, hyper);
    }
    result.report.epoch_loss.push_back(loss(model.layers, full, hyper.lambda));
  }

  const auto on_train = evaluate(model, train_set);
  result.report.train_accuracy = on_train.accuracy;
  result.report.confusion = on_train.confusion;
  if (test_set != nullptr && !test_set->empty()) {
    const auto on_test = evaluate(model, *test_set);
    result.report.test_accuracy = on_test.accuracy;
    result.report.confusion = on_test.confusion;
  }
  return result;
}

}  // namespace smartbag::nn
