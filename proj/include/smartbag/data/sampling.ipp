#pragma once

#include <random>

namespace smartbag::data {

template <typename Rng>
Eigen::VectorXd sample_features(const ClassProfile& profile, Rng& rng) {
  Eigen::VectorXd x(profile.mean.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (static_cast<std::size_t>(i) == kWater) {
      std::bernoulli_distribution water(profile.water_probability);
      x[i] = water(rng) ? 1.0 : 0.0;
    } else if (profile.stddev[i] == 0.0) {
      x[i] = profile.mean[i];
    } else {
      std::normal_distribution<double> noise(profile.mean[i], profile.stddev[i]);
      x[i] = noise(rng);
    }
  }
  return x;
}

}  // namespace smartbag::data
