// Copyright 2026 The rlife Authors
// SPDX-License-Identifier: Apache-2.0

#include "rlife/grnn.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "rlife/random.hpp"

namespace rlife {
namespace {

TEST(GrnnKernel, HalvesAtSpread) {
  for (double spread : {0.01, 0.05, 1.0, 30.0}) {
    EXPECT_NEAR(grnn_kernel(spread, kGrnnBiasConstant / spread), 0.5, 1e-3);
  }
  EXPECT_EQ(grnn_kernel(0.0, 10.0), 1.0);
}

TEST(Grnn, SingleCenterReturnsItsTarget) {
  const Eigen::MatrixXd c = Eigen::MatrixXd::Constant(1, 3, 0.4);
  const Eigen::VectorXd t = Eigen::VectorXd::Constant(1, 7.5);
  const auto m = grnn_build(c, t, 0.2);
  EXPECT_EQ(grnn_predict(m, Eigen::Vector3d(0.4, 0.4, 0.4)), 7.5);
  EXPECT_DOUBLE_EQ(grnn_predict(m, Eigen::Vector3d(0.9, 0.1, 0.6)), 7.5);
}

TEST(Grnn, TwoCentersByHand) {
  Eigen::MatrixXd c(2, 2);
  c << 0, 0, 1, 0;
  const Eigen::Vector2d t(10, 20);
  const auto m = grnn_build(c, t, 0.5);
  const double b = 0.8326 / 0.5;
  const double d0 = 0.5, d1 = std::hypot(0.7, 0.4);
  const double k0 = std::exp(-(d0 * b) * (d0 * b)), k1 = std::exp(-(d1 * b) * (d1 * b));
  EXPECT_NEAR(grnn_predict(m, Eigen::Vector2d(0.3, 0.4)), (10 * k0 + 20 * k1) / (k0 + k1), 1e-12);
}

TEST(Grnn, SmallSpreadInterpolatesTrainingPoints) {
  Rng rng(3);
  Eigen::MatrixXd c(20, 4);
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = uniform01(rng);
  Eigen::VectorXd t(20);
  for (Eigen::Index i = 0; i < 20; ++i) t(i) = uniform(rng, 0, 100);
  const auto m = grnn_build(c, t, 0.01);
  const Eigen::VectorXd p = grnn_predict_rows(m, c);
  EXPECT_LT((p - t).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Grnn, WideSpreadAveragesTargets) {
  Eigen::MatrixXd c(3, 1);
  c << 0, 0.5, 1;
  const Eigen::Vector3d t(1, 2, 6);
  const auto m = grnn_build(c, t, 1e6);
  EXPECT_NEAR(grnn_predict(m, Eigen::VectorXd::Constant(1, 0.2)), 3.0, 1e-9);
}

TEST(Grnn, PredictionStaysWithinTargetRange) {
  Rng rng(11);
  Eigen::MatrixXd c(30, 3);
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = uniform01(rng);
  Eigen::VectorXd t(30);
  for (Eigen::Index i = 0; i < 30; ++i) t(i) = uniform(rng, -5, 5);
  for (double spread : {0.01, 0.1, 1.0}) {
    const auto m = grnn_build(c, t, spread);
    for (int q = 0; q < 200; ++q) {
      const Eigen::Vector3d x(uniform(rng, -1, 2), uniform(rng, -1, 2), uniform(rng, -1, 2));
      const double y = grnn_predict(m, x);
      EXPECT_GE(y, t.minCoeff() - 1e-12);
      EXPECT_LE(y, t.maxCoeff() + 1e-12);
    }
  }
}

TEST(Grnn, UnderflowFallsBackToNearestCenter) {
  Eigen::MatrixXd c(3, 1);
  c << 0, 1, 2;
  const Eigen::Vector3d t(5, 6, 7);
  const auto m = grnn_build(c, t, 1e-4);
  EXPECT_EQ(grnn_predict(m, Eigen::VectorXd::Constant(1, 1.4)), 6.0);
  EXPECT_EQ(grnn_predict(m, Eigen::VectorXd::Constant(1, 0.5)), 5.0);
  EXPECT_EQ(grnn_predict(m, Eigen::VectorXd::Constant(1, 50.0)), 7.0);
}

TEST(Grnn, Rejects) {
  const Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
  const Eigen::Vector2d t(1, 2);
  EXPECT_THROW(grnn_build(c, t, 0.0), DomainError);
  EXPECT_THROW(grnn_build(c, Eigen::Vector3d(1, 2, 3), 0.1), DomainError);
  EXPECT_THROW(grnn_build(Eigen::MatrixXd(0, 2), Eigen::VectorXd(0), 0.1), DomainError);
  const auto m = grnn_build(c, t, 0.1);
  EXPECT_THROW(grnn_predict(m, Eigen::Vector3d(0, 0, 0)), DomainError);
}

}  // namespace
}  // namespace rlife
