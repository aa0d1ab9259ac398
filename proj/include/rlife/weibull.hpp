// Copyright 2026 The rlife Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rlife/error.hpp"

namespace rlife {

/// Two-parameter Weibull distribution. `eta` is the characteristic life, in
/// the same units as the times it was fitted on.
template <typename Scalar>
struct Weibull {
  Scalar beta;
  Scalar eta;
};

template <typename Scalar>
Scalar weibull_cdf(const Weibull<Scalar>& m, Scalar t) {
  if (t < Scalar(0)) throw DomainError("weibull_cdf: negative time");
  using std::exp;
  using std::pow;
  return Scalar(1) - exp(-pow(t / m.eta, m.beta));
}

/// Quantile function; `p` in [0, 1).
template <typename Scalar>
Scalar weibull_quantile(const Weibull<Scalar>& m, Scalar p) {
  using std::log;
  using std::pow;
  return m.eta * pow(-log(Scalar(1) - p), Scalar(1) / m.beta);
}

/// Population baseline: every unit is assumed to live to the characteristic
/// life, so the residual is eta minus the elapsed time, floored at zero.
template <typename Scalar>
Scalar weibull_baseline_residual(const Weibull<Scalar>& m, Scalar elapsed) {
  if (elapsed < Scalar(0)) throw DomainError("weibull_baseline_residual: negative elapsed time");
  return std::max(m.eta - elapsed, Scalar(0));
}

template <typename Scalar>
Scalar weibull_log_likelihood(const Weibull<Scalar>& m, std::span<const Scalar> times) {
  using std::log;
  using std::pow;
  Scalar ll = 0;
  for (Scalar t : times) {
    const Scalar z = t / m.eta;
    ll += log(m.beta / m.eta) + (m.beta - 1) * log(z) - pow(z, m.beta);
  }
  return ll;
}

/// Gradient of the log-likelihood with respect to (beta, eta).
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> weibull_score(const Weibull<Scalar>& m, std::span<const Scalar> times) {
  using std::log;
  using std::pow;
  const auto n = static_cast<Scalar>(times.size());
  Scalar d_beta = n / m.beta;
  Scalar sum_z = 0;
  for (Scalar t : times) {
    const Scalar z = t / m.eta;
    const Scalar zb = pow(z, m.beta);
    d_beta += log(z) - zb * log(z);
    sum_z += zb;
  }
  const Scalar d_eta = (m.beta / m.eta) * (sum_z - n);
  return {d_beta, d_eta};
}

namespace detail {

// Profile-likelihood equation for the shape, in log-time shifted by the
// maximum so that exp(beta * u) never overflows:
//   g(beta) = sum(w u) / sum(w) - 1/beta - mean(u),  w = exp(beta u).
// g is strictly increasing; its derivative is the w-weighted variance of u
// plus 1/beta^2.
template <typename Scalar>
struct ProfileEquation {
  std::span<const Scalar> u;
  Scalar mean_u;

  std::pair<Scalar, Scalar> operator()(Scalar beta) const {
    using std::exp;
    Scalar s0 = 0, s1 = 0, s2 = 0;
    for (Scalar ui : u) {
      const Scalar w = exp(beta * ui);
      s0 += w;
      s1 += w * ui;
      s2 += w * ui * ui;
    }
    const Scalar m1 = s1 / s0;
    const Scalar g = m1 - Scalar(1) / beta - mean_u;
    const Scalar dg = s2 / s0 - m1 * m1 + Scalar(1) / (beta * beta);
    return {g, dg};
  }
};

}  // namespace detail

/// Maximum-likelihood fit on complete (uncensored) failure times.
///
/// The shape solves the profile equation by bracketing and bisection, then
/// Newton polishing until successive iterates differ by less than 1e-10.
template <typename Scalar>
Weibull<Scalar> fit_weibull_mle(std::span<const Scalar> times) {
  using std::abs;
  using std::exp;
  using std::log;
  using std::pow;
  if (times.size() < 3) throw DomainError("fit_weibull_mle: need at least 3 failure times");
  for (Scalar t : times) {
    if (!(t > Scalar(0)) || !std::isfinite(static_cast<double>(t))) {
      throw DomainError("fit_weibull_mle: failure times must be positive and finite");
    }
  }
  const auto [lo_it, hi_it] = std::minmax_element(times.begin(), times.end());
  if (*lo_it == *hi_it) {
    throw DomainError("fit_weibull_mle: degenerate sample (all failure times identical)");
  }

  const Scalar t_max = *hi_it;
  std::vector<Scalar> u(times.size());
  Scalar mean_u = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    u[i] = log(times[i] / t_max);
    mean_u += u[i];
  }
  mean_u /= static_cast<Scalar>(times.size());
  const detail::ProfileEquation<Scalar> g{u, mean_u};

  Scalar lo = Scalar(1e-3), hi = Scalar(1);
  while (g(lo).first > 0 && lo > Scalar(1e-12)) lo /= 10;
  while (g(hi).first < 0) {
    lo = hi;
    hi *= 2;
    if (hi > Scalar(1e8)) throw DomainError("fit_weibull_mle: shape bracket diverged");
  }
  while (hi - lo > Scalar(1e-6) * hi) {
    const Scalar mid = (lo + hi) / 2;
    (g(mid).first < 0 ? lo : hi) = mid;
  }

  Scalar beta = (lo + hi) / 2;
  for (int iter = 0; iter < 100; ++iter) {
    const auto [value, slope] = g(beta);
    Scalar next = beta - value / slope;
    if (!(next > lo && next < hi)) next = (lo + hi) / 2;
    (value < 0 ? lo : hi) = beta;
    const Scalar step = abs(next - beta);
    beta = next;
    if (step < Scalar(1e-10)) break;
  }

  Scalar mean_w = 0;
  for (Scalar ui : u) mean_w += exp(beta * ui);
  mean_w /= static_cast<Scalar>(u.size());
  const Scalar eta = t_max * pow(mean_w, Scalar(1) / beta);
  return {beta, eta};
}

}  // namespace rlife
