// Copyright 2026 The rlife Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "rlife/error.hpp"

namespace rlife {

/// Radial-basis bias constant: exp(-0.8326^2) ~= 0.5, so a hidden unit's
/// activation halves at distance `spread` from its center.
inline constexpr double kGrnnBiasConstant = 0.8326;

/// General regression network. Centers and targets are the training rows
/// verbatim; nothing is fitted.
template <typename Scalar>
struct Grnn {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> centers;  // n x d
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> targets;               // n
  Scalar spread;

  Scalar bias() const { return static_cast<Scalar>(kGrnnBiasConstant) / spread; }
  Eigen::Index size() const { return centers.rows(); }
  Eigen::Index dimension() const { return centers.cols(); }
};

/// Hidden-unit activation exp(-(distance * bias)^2).
template <typename Scalar>
Scalar grnn_kernel(Scalar distance, Scalar bias) {
  using std::exp;
  const Scalar s = distance * bias;
  return exp(-s * s);
}

template <typename DerivedX, typename DerivedY>
Grnn<typename DerivedX::Scalar> grnn_build(const Eigen::MatrixBase<DerivedX>& inputs,
                                           const Eigen::MatrixBase<DerivedY>& targets,
                                           typename DerivedX::Scalar spread) {
  if (inputs.rows() == 0) throw DomainError("grnn_build: empty training set");
  if (targets.size() != inputs.rows()) throw DomainError("grnn_build: input/target count mismatch");
  if (!(spread > 0)) throw DomainError("grnn_build: spread must be positive");
  return {inputs, targets, spread};
}

/// Kernel-weighted average of the training targets. When every kernel
/// underflows to zero, returns the target of the nearest center (lowest
/// index on ties).
template <typename Scalar, typename Derived>
Scalar grnn_predict(const Grnn<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != m.dimension()) {
    throw DomainError("grnn_predict: expected " + std::to_string(m.dimension()) +
                      " inputs, got " + std::to_string(x.size()));
  }
  const Scalar b = m.bias();
  Scalar num = 0, den = 0;
  Scalar nearest = std::numeric_limits<Scalar>::infinity();
  Eigen::Index nearest_index = 0;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Scalar d = (m.centers.row(i) - x.transpose().template cast<Scalar>()).norm();
    const Scalar k = grnn_kernel(d, b);
    num += k * m.targets(i);
    den += k;
    if (d < nearest) {
      nearest = d;
      nearest_index = i;
    }
  }
  if (den > Scalar(0)) return num / den;
  return m.targets(nearest_index);
}

/// Row-wise predictions.
template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> grnn_predict_rows(const Grnn<Scalar>& m,
                                                           const Eigen::MatrixBase<Derived>& x) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out(i) = grnn_predict(m, x.row(i).transpose());
  return out;
}

}  // namespace rlife
