// Copyright 2026 The rlife Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rlife/eval.hpp"
#include "rlife/features.hpp"
#include "rlife/sim.hpp"

namespace rlife::testing {

/// Normalized renewal rows from the default simulator at `seed`.
struct NormalizedSet {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

inline NormalizedSet renewal_training_set(std::uint64_t seed, std::size_t skip_runs = 3) {
  RenewalSimConfig cfg;
  cfg.seed = seed;
  auto runs = simulate_renewal(cfg);
  runs.resize(runs.size() - skip_runs);
  const auto set = renewal_features(runs);
  const Eigen::MatrixXd x = set.input_matrix();
  const Eigen::VectorXd y = set.target_vector();
  const auto norm = fit_normalizer(x, y);
  return {norm.inputs.normalize_rows(x), norm.target.normalize_rows(y)};
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("rlife_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace rlife::testing
