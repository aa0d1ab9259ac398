// Copyright 2026 The rlife Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rlife/error.hpp"
#include "rlife/random.hpp"

namespace rlife {

enum class Transfer { log_sigmoid, linear };

std::string_view to_string(Transfer t);
Transfer parse_transfer(std::string_view name);

/// Single-hidden-layer, single-output network shape.
struct MlpLayout {
  Eigen::Index n_inputs = 1;
  Eigen::Index n_hidden = 1;
  Transfer hidden_transfer = Transfer::log_sigmoid;
  Transfer output_transfer = Transfer::log_sigmoid;

  /// W = n_hidden * (n_inputs + 1) + (n_hidden + 1).
  Eigen::Index parameter_count() const { return n_hidden * (n_inputs + 1) + n_hidden + 1; }

  void validate() const {
    if (n_inputs < 1) throw DomainError("mlp layout: need at least one input");
    if (n_hidden < 1) throw DomainError("mlp layout: need at least one hidden node");
    if (hidden_transfer != Transfer::log_sigmoid) {
      throw DomainError("mlp layout: hidden layer must be log-sigmoid");
    }
  }

  bool operator==(const MlpLayout&) const = default;
};

/// Hidden weights are n_hidden x (n_inputs + 1) with the bias in the last
/// column; output weights are 1 x (n_hidden + 1), bias last.
template <typename Scalar>
struct Mlp {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

  MlpLayout layout;
  Matrix hidden_weights;
  RowVector output_weights;
};

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Weights uniform on [-0.5, 0.5], row-major hidden then output.
template <typename Scalar>
Mlp<Scalar> mlp_init(const MlpLayout& layout, std::uint64_t seed) {
  layout.validate();
  Rng rng(seed);
  Mlp<Scalar> m{layout, MatrixX<Scalar>(layout.n_hidden, layout.n_inputs + 1),
                typename Mlp<Scalar>::RowVector(layout.n_hidden + 1)};
  for (Eigen::Index k = 0; k < layout.n_hidden; ++k) {
    for (Eigen::Index j = 0; j <= layout.n_inputs; ++j) {
      m.hidden_weights(k, j) = static_cast<Scalar>(uniform01(rng) - 0.5);
    }
  }
  for (Eigen::Index k = 0; k <= layout.n_hidden; ++k) {
    m.output_weights(k) = static_cast<Scalar>(uniform01(rng) - 0.5);
  }
  return m;
}

template <typename Scalar>
VectorX<Scalar> pack(const Mlp<Scalar>& m) {
  const auto nh = m.layout.n_hidden;
  const auto ni1 = m.layout.n_inputs + 1;
  VectorX<Scalar> w(m.layout.parameter_count());
  for (Eigen::Index k = 0; k < nh; ++k) w.segment(k * ni1, ni1) = m.hidden_weights.row(k).transpose();
  w.tail(nh + 1) = m.output_weights.transpose();
  return w;
}

template <typename Scalar>
void unpack(Mlp<Scalar>& m, const VectorX<Scalar>& w) {
  const auto nh = m.layout.n_hidden;
  const auto ni1 = m.layout.n_inputs + 1;
  if (w.size() != m.layout.parameter_count()) throw DomainError("unpack: parameter count mismatch");
  m.hidden_weights.resize(nh, ni1);
  for (Eigen::Index k = 0; k < nh; ++k) m.hidden_weights.row(k) = w.segment(k * ni1, ni1).transpose();
  m.output_weights = w.tail(nh + 1).transpose();
}

namespace detail {

template <typename Derived>
auto log_sigmoid(const Eigen::ArrayBase<Derived>& z) {
  using Scalar = typename Derived::Scalar;
  return (Scalar(1) + (-z).exp()).inverse();
}

template <typename Derived>
void check_inputs(const Eigen::MatrixBase<Derived>& x, Eigen::Index n_inputs) {
  if (x.cols() != n_inputs) {
    throw DomainError("mlp: expected " + std::to_string(n_inputs) + " inputs, got " +
                      std::to_string(x.cols()));
  }
  if (!x.allFinite()) throw DomainError("mlp: non-finite input");
}

/// Hidden activations and network outputs for a batch (rows are observations).
template <typename Scalar>
struct ForwardPass {
  MatrixX<Scalar> hidden;  // n x n_hidden
  VectorX<Scalar> output;  // n
};

template <typename Scalar, typename Derived>
ForwardPass<Scalar> forward_pass(const Mlp<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
  check_inputs(x, m.layout.n_inputs);
  const auto ni = m.layout.n_inputs;
  const auto nh = m.layout.n_hidden;
  MatrixX<Scalar> pre = x * m.hidden_weights.leftCols(ni).transpose();
  pre.rowwise() += m.hidden_weights.col(ni).transpose();
  ForwardPass<Scalar> f;
  f.hidden = log_sigmoid(pre.array()).matrix();
  VectorX<Scalar> z = f.hidden * m.output_weights.head(nh).transpose();
  z.array() += m.output_weights(nh);
  f.output = m.layout.output_transfer == Transfer::linear
                 ? z
                 : VectorX<Scalar>(log_sigmoid(z.array()).matrix());
  return f;
}

}  // namespace detail

/// Network outputs for every row of `x`.
template <typename Scalar, typename Derived>
VectorX<Scalar> mlp_forward(const Mlp<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
  return detail::forward_pass(m, x).output;
}

/// Single-observation forward pass.
template <typename Scalar>
Scalar mlp_forward_one(const Mlp<Scalar>& m, const VectorX<Scalar>& x) {
  return mlp_forward(m, x.transpose())(0);
}

template <typename Scalar, typename DerivedX, typename DerivedY>
Scalar mlp_mse(const Mlp<Scalar>& m, const Eigen::MatrixBase<DerivedX>& x,
               const Eigen::MatrixBase<DerivedY>& y) {
  return (mlp_forward(m, x) - y).squaredNorm() / static_cast<Scalar>(x.rows());
}

/// Residuals r = output - target and their Jacobian J = dr/dw (n x W),
/// columns ordered as in pack().
template <typename Scalar>
struct ResidualJacobian {
  MatrixX<Scalar> jacobian;
  VectorX<Scalar> residuals;
};

template <typename Scalar, typename DerivedX, typename DerivedY>
ResidualJacobian<Scalar> mlp_residual_jacobian(const Mlp<Scalar>& m,
                                               const Eigen::MatrixBase<DerivedX>& x,
                                               const Eigen::MatrixBase<DerivedY>& y) {
  const auto n = x.rows();
  const auto ni = m.layout.n_inputs;
  const auto nh = m.layout.n_hidden;
  if (y.size() != n) throw DomainError("mlp: input/target row count mismatch");
  const auto f = detail::forward_pass(m, x);

  VectorX<Scalar> dout = m.layout.output_transfer == Transfer::linear
                             ? VectorX<Scalar>::Ones(n)
                             : VectorX<Scalar>(f.output.array() * (Scalar(1) - f.output.array()));
  // Back-propagated sensitivity at each hidden pre-activation.
  MatrixX<Scalar> delta = (f.hidden.array() * (Scalar(1) - f.hidden.array())).matrix();
  delta.array().colwise() *= dout.array();
  delta.array().rowwise() *= m.output_weights.head(nh).array();

  ResidualJacobian<Scalar> out;
  out.jacobian.resize(n, m.layout.parameter_count());
  for (Eigen::Index k = 0; k < nh; ++k) {
    auto block = out.jacobian.middleCols(k * (ni + 1), ni + 1);
    block.leftCols(ni) = delta.col(k).asDiagonal() * x;
    block.col(ni) = delta.col(k);
  }
  auto tail = out.jacobian.rightCols(nh + 1);
  tail.leftCols(nh) = dout.asDiagonal() * f.hidden;
  tail.col(nh) = dout;
  out.residuals = f.output - y;
  return out;
}

/// Gradient of half the mean squared error with respect to all W parameters.
template <typename Scalar, typename DerivedX, typename DerivedY>
VectorX<Scalar> mlp_gradient(const Mlp<Scalar>& m, const Eigen::MatrixBase<DerivedX>& x,
                             const Eigen::MatrixBase<DerivedY>& y) {
  if (x.rows() == 0) throw DomainError("mlp_gradient: empty batch");
  const auto rj = mlp_residual_jacobian(m, x, y);
  return rj.jacobian.transpose() * rj.residuals / static_cast<Scalar>(x.rows());
}

// ---------------------------------------------------------------------------
// Training

enum class StopReason { target_reached, epoch_limit, converged };

std::string_view to_string(StopReason r);

struct TrainHistory {
  double initial_mse = 0.0;
  std::vector<double> mse;  // one entry per completed epoch
  StopReason stop = StopReason::epoch_limit;
  std::vector<double> effective_parameters;  // Bayesian mode only, per epoch
  std::optional<double> final_effective_parameters;

  std::size_t epochs() const { return mse.size(); }
  double final_mse() const { return mse.empty() ? initial_mse : mse.back(); }
};

template <typename Scalar>
struct TrainResult {
  Mlp<Scalar> model;
  TrainHistory history;
};

/// Thrown when training produces a non-finite error.
class DivergenceError : public DomainError {
public:
  DivergenceError(std::size_t epoch, const std::string& what)
      : DomainError(what + " (epoch " + std::to_string(epoch) + ")"), epoch_(epoch) {}
  std::size_t epoch() const { return epoch_; }

private:
  std::size_t epoch_;
};

struct GdConfig {
  double learning_rate = 0.75;
  double momentum = 0.9;
  int max_epochs = 1000;
  double mse_target = 1e-5;

  void validate() const {
    if (!(learning_rate >= 0.0)) throw DomainError("gd: learning rate must be non-negative");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw DomainError("gd: momentum must be in [0, 1)");
    if (max_epochs < 0) throw DomainError("gd: max_epochs must be non-negative");
    if (!(mse_target > 0.0)) throw DomainError("gd: mse_target must be positive");
  }
};

/// Full-batch gradient descent with momentum:
///   v <- momentum * v - learning_rate * grad,  w <- w + v.
template <typename Scalar, typename DerivedX, typename DerivedY>
TrainResult<Scalar> train_gd_momentum(Mlp<Scalar> m, const Eigen::MatrixBase<DerivedX>& x,
                                      const Eigen::MatrixBase<DerivedY>& y, const GdConfig& cfg) {
  cfg.validate();
  if (x.rows() == 0) throw DomainError("train_gd_momentum: empty training set");
  TrainHistory h;
  h.initial_mse = static_cast<double>(mlp_mse(m, x, y));
  if (h.initial_mse <= cfg.mse_target) {
    h.stop = StopReason::target_reached;
    return {std::move(m), std::move(h)};
  }
  VectorX<Scalar> w = pack(m);
  VectorX<Scalar> velocity = VectorX<Scalar>::Zero(w.size());
  const auto lr = static_cast<Scalar>(cfg.learning_rate);
  const auto mom = static_cast<Scalar>(cfg.momentum);
  h.stop = StopReason::epoch_limit;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    velocity = mom * velocity - lr * mlp_gradient(m, x, y);
    w += velocity;
    unpack(m, w);
    const double mse = static_cast<double>(mlp_mse(m, x, y));
    if (!std::isfinite(mse)) {
      throw DivergenceError(static_cast<std::size_t>(epoch), "gradient descent diverged");
    }
    h.mse.push_back(mse);
    if (mse <= cfg.mse_target) {
      h.stop = StopReason::target_reached;
      break;
    }
  }
  return {std::move(m), std::move(h)};
}

struct LmConfig {
  double lambda_init = 1e-3;
  double lambda_factor = 10.0;
  double lambda_max = 1e10;
  int max_epochs = 100;
  double mse_target = 1e-5;
  bool bayesian = false;

  void validate() const {
    if (!(lambda_init > 0.0)) throw DomainError("lm: lambda_init must be positive");
    if (!(lambda_factor > 1.0)) throw DomainError("lm: lambda_factor must exceed 1");
    if (!(lambda_max > lambda_init)) throw DomainError("lm: lambda_max must exceed lambda_init");
    if (max_epochs < 0) throw DomainError("lm: max_epochs must be non-negative");
    if (!(mse_target >= 0.0)) throw DomainError("lm: mse_target must be non-negative");
  }
};

/// Ill-conditioning guard: the network may not have more trainable
/// parameters than training observations.
struct ConditioningVerdict {
  bool ok;
  Eigen::Index parameters;
  Eigen::Index observations;
};

inline ConditioningVerdict check_conditioning(const MlpLayout& layout, Eigen::Index n_train) {
  const auto w = layout.parameter_count();
  return {w <= n_train, w, n_train};
}

class ConditioningError : public DomainError {
public:
  explicit ConditioningError(const ConditioningVerdict& v)
      : DomainError("ill-conditioned training problem: " + std::to_string(v.parameters) +
                    " parameters > " + std::to_string(v.observations) + " training rows") {}
};

/// Damped Gauss-Newton step: solves (J'J + lambda I) delta = -J'r.
template <typename Scalar>
VectorX<Scalar> lm_step(const MatrixX<Scalar>& jacobian, const VectorX<Scalar>& residuals,
                        Scalar lambda) {
  MatrixX<Scalar> a = jacobian.transpose() * jacobian;
  a.diagonal().array() += lambda;
  return a.ldlt().solve(-(jacobian.transpose() * residuals));
}

namespace detail {

// Effective number of parameters gamma = sum b*l / (b*l + a) over the
// eigenvalues l of J'J; equals W - a * tr((bJ'J + aI)^-1) and lies in [0, W].
template <typename Scalar>
Scalar effective_parameters(const MatrixX<Scalar>& jtj, Scalar alpha, Scalar beta) {
  const auto w = static_cast<Scalar>(jtj.rows());
  if (alpha == Scalar(0)) return w;
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(jtj, Eigen::EigenvaluesOnly);
  Scalar gamma = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const Scalar bl = beta * std::max(es.eigenvalues()(i), Scalar(0));
    gamma += bl / (bl + alpha);
  }
  return gamma;
}

template <typename Scalar, typename DerivedX, typename DerivedY>
TrainResult<Scalar> train_levenberg_marquardt(Mlp<Scalar> m, const Eigen::MatrixBase<DerivedX>& x,
                                              const Eigen::MatrixBase<DerivedY>& y,
                                              const LmConfig& cfg) {
  cfg.validate();
  const auto n = x.rows();
  if (n == 0) throw DomainError("train_lm: empty training set");
  const auto verdict = check_conditioning(m.layout, n);
  if (!verdict.ok) throw ConditioningError(verdict);

  const auto W = m.layout.parameter_count();
  const auto nd = static_cast<Scalar>(n);
  // Bayesian hyperparameters: F = beta * E_D + alpha * E_W, E_D = SSE, E_W = |w|^2.
  Scalar alpha = 0, beta = 1;
  Scalar lambda = static_cast<Scalar>(cfg.lambda_init);

  VectorX<Scalar> w = pack(m);
  auto rj = mlp_residual_jacobian(m, x, y);
  Scalar sse = rj.residuals.squaredNorm();

  TrainHistory h;
  h.initial_mse = static_cast<double>(sse / nd);
  if (h.initial_mse <= cfg.mse_target) {
    h.stop = StopReason::target_reached;
    if (cfg.bayesian) h.final_effective_parameters = static_cast<double>(W);
    return {std::move(m), std::move(h)};
  }
  h.stop = StopReason::epoch_limit;

  const auto objective = [&](Scalar data_sse, const VectorX<Scalar>& weights) {
    return cfg.bayesian ? beta * data_sse + alpha * weights.squaredNorm() : data_sse;
  };

  Scalar gamma = static_cast<Scalar>(W);
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    MatrixX<Scalar> jtj = rj.jacobian.transpose() * rj.jacobian;
    VectorX<Scalar> grad = rj.jacobian.transpose() * rj.residuals;
    if (cfg.bayesian) {
      jtj *= beta;
      grad = beta * grad + alpha * w;
    }
    const Scalar f_current = objective(sse, w);

    bool accepted = false;
    bool solvable = false;
    VectorX<Scalar> w_new;
    ResidualJacobian<Scalar> rj_new;
    Scalar sse_new = 0;
    while (lambda <= static_cast<Scalar>(cfg.lambda_max)) {
      MatrixX<Scalar> a = jtj;
      a.diagonal().array() += lambda + (cfg.bayesian ? alpha : Scalar(0));
      Eigen::LDLT<MatrixX<Scalar>> ldlt(a);
      VectorX<Scalar> delta;
      if (ldlt.info() == Eigen::Success) delta = ldlt.solve(-grad);
      if (ldlt.info() == Eigen::Success && delta.allFinite()) {
        solvable = true;
        w_new = w + delta;
        unpack(m, w_new);
        sse_new = (mlp_forward(m, x) - y).squaredNorm();
        if (std::isfinite(static_cast<double>(sse_new)) &&
            objective(sse_new, w_new) < f_current) {
          accepted = true;
          break;
        }
      }
      lambda *= static_cast<Scalar>(cfg.lambda_factor);
    }

    if (!accepted) {
      unpack(m, w);
      if (!solvable) {
        throw DivergenceError(static_cast<std::size_t>(epoch),
                              "singular normal matrix after damping cap");
      }
      h.stop = StopReason::converged;
      break;
    }

    lambda /= static_cast<Scalar>(cfg.lambda_factor);
    w = std::move(w_new);
    sse = sse_new;
    rj = mlp_residual_jacobian(m, x, y);

    if (cfg.bayesian) {
      const MatrixX<Scalar> jtj_new = rj.jacobian.transpose() * rj.jacobian;
      gamma = effective_parameters(jtj_new, alpha, beta);
      const Scalar ew = w.squaredNorm();
      alpha = ew > Scalar(0) ? gamma / (Scalar(2) * ew) : Scalar(1e-8);
      const Scalar dof = std::max(nd - gamma, std::numeric_limits<Scalar>::epsilon());
      beta = dof / (Scalar(2) * std::max(sse, std::numeric_limits<Scalar>::min()));
      h.effective_parameters.push_back(static_cast<double>(gamma));
    }

    const double mse = static_cast<double>(sse / nd);
    h.mse.push_back(mse);
    if (mse <= cfg.mse_target) {
      h.stop = StopReason::target_reached;
      break;
    }
  }
  if (cfg.bayesian) h.final_effective_parameters = static_cast<double>(gamma);
  return {std::move(m), std::move(h)};
}

}  // namespace detail

/// Levenberg-Marquardt on the sum of squared errors. An epoch computes one
/// Jacobian; within it the damping grows by `lambda_factor` until a step
/// lowers the error (then shrinks by the same factor). Stops at the MSE
/// target, the epoch limit, or when the damping exceeds `lambda_max`.
template <typename Scalar, typename DerivedX, typename DerivedY>
TrainResult<Scalar> train_lm(Mlp<Scalar> m, const Eigen::MatrixBase<DerivedX>& x,
                             const Eigen::MatrixBase<DerivedY>& y, LmConfig cfg) {
  cfg.bayesian = false;
  return detail::train_levenberg_marquardt(std::move(m), x, y, cfg);
}

/// Levenberg-Marquardt with Bayesian regularization. Minimizes
/// beta * SSE + alpha * |w|^2, re-estimating alpha and beta from the effective
/// number of parameters after every accepted step (Gauss-Newton Hessian).
template <typename Scalar, typename DerivedX, typename DerivedY>
TrainResult<Scalar> train_lmbr(Mlp<Scalar> m, const Eigen::MatrixBase<DerivedX>& x,
                               const Eigen::MatrixBase<DerivedY>& y, LmConfig cfg) {
  cfg.bayesian = true;
  return detail::train_levenberg_marquardt(std::move(m), x, y, cfg);
}

}  // namespace rlife
