// Copyright 2026 The rlife Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>

#include <Eigen/Dense>

#include "rlife/error.hpp"

namespace rlife {

/// Per-column min-max scaling onto [0, 1].
///
/// Values outside the fitted range are extrapolated linearly and never
/// clamped, so held-out rows may land outside [0, 1].
template <typename Scalar>
class MinMaxScaler {
public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  MinMaxScaler() = default;
  MinMaxScaler(Vector min, Vector max) : min_(std::move(min)), max_(std::move(max)) {
    if (min_.size() != max_.size()) throw DomainError("scaler: min/max arity mismatch");
    for (Eigen::Index j = 0; j < min_.size(); ++j) {
      if (!(max_(j) > min_(j))) {
        throw DomainError("scaler: column " + std::to_string(j) + " has max <= min");
      }
    }
  }

  Eigen::Index size() const { return min_.size(); }
  const Vector& min() const { return min_; }
  const Vector& max() const { return max_; }

  template <typename Derived>
  Vector normalize(const Eigen::MatrixBase<Derived>& row) const {
    check_arity(row.size());
    return ((row.template cast<Scalar>() - min_).array() / (max_ - min_).array()).matrix();
  }

  template <typename Derived>
  Vector denormalize(const Eigen::MatrixBase<Derived>& row) const {
    check_arity(row.size());
    return (row.template cast<Scalar>().array() * (max_ - min_).array() + min_.array()).matrix();
  }

  Scalar normalize(Eigen::Index column, Scalar x) const {
    return (x - min_(column)) / (max_(column) - min_(column));
  }
  Scalar denormalize(Eigen::Index column, Scalar x) const {
    return x * (max_(column) - min_(column)) + min_(column);
  }

  /// Row-wise normalization of an observations-by-columns matrix.
  template <typename Derived>
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> normalize_rows(
      const Eigen::MatrixBase<Derived>& rows) const {
    check_arity(rows.cols());
    return ((rows.template cast<Scalar>().rowwise() - min_.transpose()).array().rowwise() /
            (max_ - min_).transpose().array())
        .matrix();
  }

private:
  void check_arity(Eigen::Index n) const {
    if (n != min_.size()) {
      throw DomainError("scaler: expected " + std::to_string(min_.size()) + " values, got " +
                        std::to_string(n));
    }
  }

  Vector min_;
  Vector max_;
};

/// Fit a scaler on the columns of `data` (observations by columns).
/// `names`, when given, label the columns in error messages.
template <typename Derived>
MinMaxScaler<typename Derived::Scalar> fit_scaler(const Eigen::MatrixBase<Derived>& data,
                                                  std::span<const std::string> names = {}) {
  using Scalar = typename Derived::Scalar;
  if (data.rows() < 2) throw DomainError("fit_normalizer: need at least 2 rows");
  typename MinMaxScaler<Scalar>::Vector lo = data.colwise().minCoeff().transpose();
  typename MinMaxScaler<Scalar>::Vector hi = data.colwise().maxCoeff().transpose();
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    if (!(hi(j) > lo(j))) {
      const std::string label = static_cast<std::size_t>(j) < names.size()
                                    ? "'" + names[static_cast<std::size_t>(j)] + "'"
                                    : std::to_string(j);
      throw DomainError("fit_normalizer: column " + label + " is constant");
    }
  }
  return MinMaxScaler<Scalar>(std::move(lo), std::move(hi));
}

/// Input and target scalers fitted together on a training set.
template <typename Scalar>
struct Normalizer {
  MinMaxScaler<Scalar> inputs;
  MinMaxScaler<Scalar> target;

  Scalar normalize_target(Scalar y) const { return target.normalize(0, y); }
  Scalar denormalize_target(Scalar y) const { return target.denormalize(0, y); }
};

template <typename DerivedX, typename DerivedY>
Normalizer<typename DerivedX::Scalar> fit_normalizer(const Eigen::MatrixBase<DerivedX>& inputs,
                                                     const Eigen::MatrixBase<DerivedY>& targets,
                                                     std::span<const std::string> names = {}) {
  const std::string target_name[] = {"target"};
  return {fit_scaler(inputs, names), fit_scaler(targets, target_name)};
}

}  // namespace rlife
