#pragma once

#include <stdexcept>

#include <Eigen/Dense>

namespace smartbag::nn {

/// Elementwise max(z, 0).
template <typename Derived>
typename Derived::PlainObject relu(const Eigen::MatrixBase<Derived>& z) {
  using Scalar = typename Derived::Scalar;
  if (!z.allFinite()) throw std::domain_error("relu: non-finite input");
  return z.cwiseMax(Scalar(0));
}

/// Softmax of each column. Max-subtracted, so large logits do not overflow.
template <typename Derived>
typename Derived::PlainObject softmax(const Eigen::MatrixBase<Derived>& z) {
  if (z.size() == 0) throw std::invalid_argument("softmax: empty input");
  if (!z.allFinite()) throw std::domain_error("softmax: non-finite input");
  typename Derived::PlainObject out(z.rows(), z.cols());
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    auto e = (z.col(c).array() - z.col(c).maxCoeff()).exp();
    out.col(c) = (e / e.sum()).matrix();
  }
  return out;
}

}  // namespace smartbag::nn
