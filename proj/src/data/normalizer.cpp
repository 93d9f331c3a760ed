#include "smartbag/data/dataset.hpp"

namespace smartbag::data {

Normalizer Normalizer::identity(std::size_t width) {
  const auto w = static_cast<Eigen::Index>(width);
  return {Eigen::VectorXd::Zero(w), Eigen::VectorXd::Ones(w)};
}

Normalizer fit_normalizer(const Dataset& train) {
  if (train.empty()) throw std::invalid_argument("fit_normalizer: empty dataset");
  const Eigen::MatrixXd x = train.feature_matrix();
  const auto n = static_cast<double>(x.cols());

  Normalizer out;
  out.mean = x.rowwise().sum() / n;
  out.stddev.resize(x.rows());
  for (Eigen::Index f = 0; f < x.rows(); ++f) {
    const auto row = x.row(f);
    const bool constant = (row.array() == row(0)).all();
    if (constant) {
      out.mean[f] = row(0);
      out.stddev[f] = 1.0;
    } else {
      out.stddev[f] = std::sqrt((row.array() - out.mean[f]).square().sum() / n);
    }
  }
  return out;
}

}  // namespace smartbag::data
