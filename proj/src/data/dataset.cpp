#include "smartbag/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

namespace smartbag::data {

ClassVocabulary::ClassVocabulary()
    : names_{"Idle", "Walking", "Running", "Climbing", "Falling"} {}

ClassVocabulary::ClassVocabulary(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw std::invalid_argument("vocabulary: no classes");
  std::set<std::string_view> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw std::invalid_argument("vocabulary: empty class name");
    if (!seen.insert(n).second)
      throw std::invalid_argument("vocabulary: duplicate class name '" + n + "'");
  }
}

std::optional<std::size_t> ClassVocabulary::index_of(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

Dataset::Dataset(ClassVocabulary vocabulary, std::size_t feature_count)
    : vocabulary_(std::move(vocabulary)), feature_count_(feature_count) {
  if (feature_count_ == 0) throw std::invalid_argument("dataset: zero feature width");
}

void Dataset::add(LabeledExample example) {
  if (static_cast<std::size_t>(example.features.size()) != feature_count_)
    throw std::invalid_argument("dataset: feature width mismatch");
  if (!example.features.allFinite())
    throw std::invalid_argument("dataset: non-finite feature");
  if (example.label >= vocabulary_.size())
    throw std::invalid_argument("dataset: label out of range");
  examples_.push_back(std::move(example));
}

Eigen::MatrixXd Dataset::feature_matrix() const {
  Eigen::MatrixXd m(feature_count_, examples_.size());
  for (std::size_t i = 0; i < examples_.size(); ++i) m.col(i) = examples_[i].features;
  return m;
}

std::vector<std::size_t> Dataset::labels() const {
  std::vector<std::size_t> out;
  out.reserve(examples_.size());
  for (const auto& e : examples_) out.push_back(e.label);
  return out;
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(vocabulary_.size(), 0);
  for (const auto& e : examples_) ++counts[e.label];
  return counts;
}

Split split(const Dataset& dataset, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("split: train fraction must be in (0, 1)");
  if (dataset.empty()) throw std::invalid_argument("split: empty dataset");

  const std::size_t n = dataset.size();
  const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  Split out{Dataset(dataset.vocabulary(), dataset.feature_count()),
            Dataset(dataset.vocabulary(), dataset.feature_count())};
  out.train.reserve(n_train);
  out.test.reserve(n - n_train);
  for (std::size_t i = 0; i < n; ++i)
    (i < n_train ? out.train : out.test).add(dataset[order[i]]);
  return out;
}

}  // namespace smartbag::data
