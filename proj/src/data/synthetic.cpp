#include <random>

#include "smartbag/data/dataset.hpp"

namespace smartbag::data {

void ClassProfile::validate() const {
  if (mean.size() != static_cast<Eigen::Index>(kFeatureCount) || stddev.size() != mean.size())
    throw std::invalid_argument("class profile: expected 13 means and stddevs");
  if (!mean.allFinite() || !stddev.allFinite() || (stddev.array() < 0.0).any())
    throw std::invalid_argument("class profile: stddevs must be finite and >= 0");
  auto is_probability = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!is_probability(sos_probability) || !is_probability(water_probability))
    throw std::invalid_argument("class profile: probabilities must lie in [0, 1]");
}

namespace {

ClassProfile profile(std::initializer_list<double> mean, std::initializer_list<double> stddev,
                     double sos, double water) {
  ClassProfile p;
  p.mean = Eigen::Map<const Eigen::VectorXd>(mean.begin(), static_cast<Eigen::Index>(mean.size()));
  p.stddev = Eigen::Map<const Eigen::VectorXd>(stddev.begin(), static_cast<Eigen::Index>(stddev.size()));
  p.sos_probability = sos;
  p.water_probability = water;
  p.mean[kWater] = water;
  return p;
}

}  // namespace

// Ambient channels (gas, temp, humidity) share one distribution across classes
// so that only motion and strap load carry activity evidence. Gas means sit at
// least 5 stddevs under the default alert thresholds (mq2 300, mq135 200).
std::vector<ClassProfile> default_profiles() {
  //                 ax     ay     az    yaw  pitch   roll  loadL  loadR  mq2  mq135 temp  hum  water
  return {
      profile({0.00, 0.10, 1.00, 0.0, 0.0, 0.0, 300, 400, 100, 80, 27, 55, 0},
              {0.03, 0.02, 0.02, 3.0, 3.0, 3.0, 15, 15, 20, 20, 2, 8, 0}, 0.0, 0.01),
      profile({0.30, -0.10, 1.15, 25.0, 40.0, 40.0, 400, 500, 100, 80, 27, 55, 0},
              {0.05, 0.03, 0.03, 4.0, 5.0, 5.0, 20, 20, 20, 20, 2, 8, 0}, 0.0, 0.01),
      profile({0.60, 0.00, 1.45, 75.0, 60.0, 60.0, 600, 600, 100, 80, 27, 55, 0},
              {0.08, 0.04, 0.05, 8.0, 7.0, 6.0, 25, 25, 20, 20, 2, 8, 0}, 0.0, 0.01),
      profile({-0.30, 0.20, 1.30, 50.0, 80.0, 20.0, 500, 300, 100, 80, 27, 55, 0},
              {0.05, 0.03, 0.03, 5.0, 6.0, 4.0, 20, 20, 20, 20, 2, 8, 0}, 0.0, 0.01),
      profile({-0.60, -0.20, 0.85, 100.0, 20.0, 80.0, 200, 200, 100, 80, 27, 55, 0},
              {0.10, 0.05, 0.05, 10.0, 5.0, 8.0, 20, 20, 20, 20, 2, 8, 0}, 0.1, 0.01),
  };
}

Dataset generate(std::span<const ClassProfile> profiles, std::size_t n, std::uint64_t seed,
                 const ClassVocabulary& vocabulary) {
  const std::size_t k = vocabulary.size();
  if (profiles.size() != k)
    throw std::invalid_argument("generate: need one profile per vocabulary class");
  if (n < k) throw std::invalid_argument("generate: n must be at least the class count");
  for (const auto& p : profiles) p.validate();

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_class(0, k - 1);

  Dataset out(vocabulary, kFeatureCount);
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t label = pick_class(rng);
    out.add({sample_features(profiles[label], rng), label});
  }
  return out;
}

}  // namespace smartbag::data
