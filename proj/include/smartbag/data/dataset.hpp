#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace smartbag::data {

inline constexpr std::size_t kFeatureCount = 13;

// Canonical feature order. GPS is telemetry only and never a model input.
enum Feature : std::size_t {
  kAx, kAy, kAz,
  kYaw, kPitch, kRoll,
  kLoadLeft, kLoadRight,
  kMq2, kMq135,
  kTemp, kHumidity,
  kWater,
};

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{
    "ax", "ay", "az", "yaw", "pitch", "roll", "load_left", "load_right",
    "mq2", "mq135", "temp", "humidity", "water"};

/// Ordered, unique activity class names. Index order is the model's output order.
class ClassVocabulary {
 public:
  /// Idle, Walking, Running, Climbing, Falling.
  ClassVocabulary();
  explicit ClassVocabulary(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t index) const { return names_.at(index); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  bool operator==(const ClassVocabulary&) const = default;

 private:
  std::vector<std::string> names_;
};

struct LabeledExample {
  Eigen::VectorXd features;
  std::size_t label = 0;
};

/// A labeled collection. Every example has the same feature width and a label
/// valid under the vocabulary; `add` enforces both.
class Dataset {
 public:
  explicit Dataset(ClassVocabulary vocabulary = {},
                   std::size_t feature_count = kFeatureCount);

  void add(LabeledExample example);
  void reserve(std::size_t n) { examples_.reserve(n); }

  const std::vector<LabeledExample>& examples() const { return examples_; }
  const LabeledExample& operator[](std::size_t i) const { return examples_[i]; }
  std::size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }
  std::size_t feature_count() const { return feature_count_; }
  const ClassVocabulary& vocabulary() const { return vocabulary_; }

  /// Features as columns: feature_count() x size().
  Eigen::MatrixXd feature_matrix() const;
  std::vector<std::size_t> labels() const;
  std::vector<std::size_t> class_counts() const;

 private:
  ClassVocabulary vocabulary_;
  std::size_t feature_count_;
  std::vector<LabeledExample> examples_;
};

class DatasetError : public std::runtime_error {
 public:
  enum class Kind { BadHeader, Arity, NonNumeric, UnknownLabel, Io };

  DatasetError(Kind kind, std::size_t row, const std::string& what)
      : std::runtime_error(what), kind_(kind), row_(row) {}

  Kind kind() const { return kind_; }
  /// 1-based line number in the source file (header is line 1).
  std::size_t row() const { return row_; }

 private:
  Kind kind_;
  std::size_t row_;
};

/// Reads `ax,...,water,label` CSV. Labels must be names in `vocabulary`.
Dataset load_csv(std::istream& in, const ClassVocabulary& vocabulary = {});
void save_csv(const Dataset& dataset, std::ostream& out);

Dataset load_csv_file(const std::string& path, const ClassVocabulary& vocabulary = {});
void save_csv_file(const Dataset& dataset, const std::string& path);

struct Split {
  Dataset train;
  Dataset test;
};

/// Seeded permutation; the first floor(train_fraction * N) rows go to train.
Split split(const Dataset& dataset, double train_fraction, std::uint64_t seed);

/// Per-feature z-score parameters. Population stddev; constant features get 1.
struct Normalizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;

  std::size_t width() const { return static_cast<std::size_t>(mean.size()); }

  /// Column-wise (x - mean) / stddev for a vector or a feature-by-sample matrix.
  template <typename Derived>
  Eigen::MatrixXd apply(const Eigen::MatrixBase<Derived>& x) const {
    if (x.rows() != mean.size())
      throw std::invalid_argument("normalizer: feature width mismatch");
    return ((x.template cast<double>().array().colwise() - mean.array()).colwise() /
            stddev.array())
        .matrix();
  }

  static Normalizer identity(std::size_t width);
};

Normalizer fit_normalizer(const Dataset& train);

/// Gaussian per-feature model for one activity class. The water channel is
/// drawn Bernoulli(water_probability) instead of from mean/stddev.
struct ClassProfile {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;
  double sos_probability = 0.0;
  double water_probability = 0.0;

  void validate() const;
};

/// One profile per default vocabulary class, in vocabulary order.
std::vector<ClassProfile> default_profiles();

inline constexpr std::size_t kDefaultRowCount = 1743;

/// Labels uniform over classes, features Gaussian per profile.
Dataset generate(std::span<const ClassProfile> profiles, std::size_t n,
                 std::uint64_t seed, const ClassVocabulary& vocabulary = {});

/// One draw from a profile, in canonical feature order.
template <typename Rng>
Eigen::VectorXd sample_features(const ClassProfile& profile, Rng& rng);

}  // namespace smartbag::data

#include "smartbag/data/sampling.ipp"
