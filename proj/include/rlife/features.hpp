// Copyright 2026 The rlife Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rlife/dataset.hpp"

namespace rlife {

struct Provenance {
  std::string group_id;  // run or pump id
  double time = 0.0;     // observation time (s for runs, days for pumps)

  bool operator==(const Provenance&) const = default;
};

/// Raw-unit covariates and the residual-life target for one observation.
struct FeatureRow {
  Eigen::VectorXd inputs;
  double target = 0.0;
  Provenance provenance;
};

/// Rows sharing one column layout.
struct FeatureSet {
  std::vector<std::string> input_names;
  std::vector<FeatureRow> rows;

  Eigen::Index arity() const { return static_cast<Eigen::Index>(input_names.size()); }
  Eigen::MatrixXd input_matrix() const;
  Eigen::VectorXd target_vector() const;
};

/// Rows of one run or pump; the unit of splitting and cross-validation.
struct FeatureGroup {
  std::string id;
  std::vector<FeatureRow> rows;
};

/// Split rows into groups by provenance id, in order of first appearance.
std::vector<FeatureGroup> group_rows(const std::vector<FeatureRow>& rows);

// ---------------------------------------------------------------------------
// Renewal covariates

const std::vector<std::string>& renewal_feature_names();

/// One row per window: elapsed time, first-window mean load, first-window
/// load range, load-range drop since the first window (positive when the
/// load falls), and temperature rise since the first window. Target is
/// failure time minus elapsed time.
std::vector<FeatureRow> renewal_features(const RenewalRun& run);
FeatureSet renewal_features(const std::vector<RenewalRun>& runs);

// ---------------------------------------------------------------------------
// Pump covariates

/// Empirical risk variable: 1 before the first failure, else (T1 / T)^2 / 2
/// where T is days since installation and T1 the day of the first failure.
double risk_variable(double days_since_install, std::optional<double> first_failure_day);

/// Remove measurements strictly within the seven days before each failure.
/// Failure-terminated intervals left without measurements are reported
/// through `warnings` when given.
PumpHistory truncate_last_week(const PumpHistory& history,
                               std::vector<std::string>* warnings = nullptr);

struct PumpFeatureStats {
  std::size_t rows = 0;
  std::size_t censored_measurements = 0;  // in suspension- or horizon-terminated intervals
};

std::vector<std::string> pump_feature_names(int n_inputs);

/// One row per measurement inside an interval that ends in failure:
/// [day, days since last failure, risk] (+ bearing 1 band) (+ bearing 2 band).
/// Target is the next failure day minus the measurement day. The history is
/// expected to be truncated already.
std::vector<FeatureRow> pump_features(const PumpHistory& history, int n_inputs,
                                      PumpFeatureStats* stats = nullptr);
FeatureSet pump_features(const std::vector<PumpHistory>& histories, int n_inputs,
                         PumpFeatureStats* stats = nullptr);

// ---------------------------------------------------------------------------
// Feature CSV: group_id,time,<input names...>,target

void write_feature_csv(std::ostream& out, const FeatureSet& set);
void save_feature_csv(const std::filesystem::path& path, const FeatureSet& set);
FeatureSet parse_feature_csv(std::istream& in, const std::string& source = "<stream>");
FeatureSet load_feature_csv(const std::filesystem::path& path);

}  // namespace rlife
