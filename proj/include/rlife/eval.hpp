// Copyright 2026 The rlife Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "rlife/features.hpp"
#include "rlife/grnn.hpp"
#include "rlife/mlp.hpp"
#include "rlife/normalizer.hpp"
#include "rlife/weibull.hpp"

namespace rlife {

enum class EstimatorKind { gd, lm, lmbr, grnn, weibull_baseline };

std::string_view to_string(EstimatorKind kind);
EstimatorKind parse_estimator_kind(std::string_view name);

/// Everything needed to build one estimator from a training set.
struct ModelSpec {
  EstimatorKind kind = EstimatorKind::lm;
  std::string label;        // display name; empty means the kind name
  Eigen::Index n_inputs = 0;  // leading input columns to use; 0 means all
  Eigen::Index n_hidden = 5;
  Transfer output_transfer = Transfer::log_sigmoid;
  GdConfig gd;
  LmConfig lm;
  double spread = 0.05;
  std::uint64_t seed = 1;
  // Column holding the unit's age for the Weibull baseline. Defaults to
  // days_since_last_failure or elapsed_s when present, else column 0.
  std::optional<Eigen::Index> age_column;

  std::string display_name() const;
  bool is_mlp() const;
};

/// Feature rows split into runs/pumps, sharing one column layout.
struct GroupedFeatures {
  std::vector<std::string> input_names;
  std::vector<FeatureGroup> groups;

  std::size_t row_count() const;
  FeatureSet flatten() const;
};

GroupedFeatures group_features(const FeatureSet& set);

/// Subset of groups by id, in the order given. Throws on unknown ids.
GroupedFeatures select_groups(const GroupedFeatures& data, std::span<const std::string> ids);
GroupedFeatures exclude_groups(const GroupedFeatures& data, std::span<const std::string> ids);

using Estimator = std::variant<Mlp<double>, Grnn<double>, Weibull<double>>;

/// A fitted estimator together with the scaling it was trained under.
/// Predictions are in physical units.
struct TrainedModel {
  ModelSpec spec;
  std::vector<std::string> input_names;
  Normalizer<double> normalizer;  // inputs unused (empty) for the Weibull baseline
  Estimator estimator;
  TrainHistory history;
  Eigen::Index age_column = 0;

  double predict(const Eigen::VectorXd& raw_inputs) const;
  Eigen::VectorXd predict_rows(const Eigen::MatrixXd& raw_inputs) const;
};

/// Fits the normalizer on `train` only, then builds the estimator.
TrainedModel train_model(const FeatureSet& train, const ModelSpec& spec);

struct Metrics {
  std::size_t count = 0;
  double mse = 0.0;       // over normalized values
  double mean_abs = 0.0;  // physical units
  double max_abs = 0.0;   // physical units
  double sse = 0.0;       // physical units squared
};

/// Aggregate errors; MSE is taken after normalizing both sides with `target`.
Metrics metrics(std::span<const double> predicted, std::span<const double> actual,
                const MinMaxScaler<double>& target);

struct Observation {
  Provenance provenance;
  double predicted = 0.0;
  double actual = 0.0;
  double error = 0.0;  // predicted - actual
};

struct EvalReport {
  std::vector<Observation> observations;
  MinMaxScaler<double> target_scaler;
  Metrics metrics;
};

EvalReport evaluate(const TrainedModel& model, const FeatureSet& data);

/// Recompute aggregates from the per-observation list.
Metrics recompute_metrics(const EvalReport& report);

struct GroupError {
  std::string group_id;
  double relative_error;  // |error| / actual residual life at the group's first row
};

/// Relative error at each group's earliest observation, in group order.
std::vector<GroupError> first_row_relative_errors(const EvalReport& report);

struct StaticSplitResult {
  TrainedModel model;
  EvalReport train;
  EvalReport test;
};

/// Train on `train`, report on both sides. Group ids must be disjoint.
StaticSplitResult static_split_eval(const GroupedFeatures& train, const GroupedFeatures& test,
                                    const ModelSpec& spec);

struct CvFold {
  std::string group_id;
  std::uint64_t seed = 0;
  TrainedModel model;
  EvalReport test;
};

struct CvReport {
  std::vector<CvFold> folds;  // ordered by group id
  double total_sse = 0.0;
};

/// Leave-one-group-out cross-validation. Each fold trains a fresh model
/// seeded from (spec.seed, held-out group id) on the remaining groups taken
/// in group-id order, so results do not depend on the order of `data.groups`.
CvReport cross_validate(const GroupedFeatures& data, const ModelSpec& spec);

enum class Protocol { static_split, cross_validation };

std::string_view to_string(Protocol p);
Protocol parse_protocol(std::string_view name);

struct ComparisonRow {
  std::string label;
  double score = 0.0;  // test SSE under CV, test MSE under static split
  Metrics train;       // static split only
  Metrics test;        // pooled over folds under CV
  std::optional<std::pair<double, double>> first_row_error_range;  // static split only
};

struct ComparisonTable {
  Protocol protocol = Protocol::cross_validation;
  std::vector<ComparisonRow> rows;  // ascending score, ties in input order

  std::string render() const;
};

ComparisonTable compare_models(std::span<const ModelSpec> specs, const GroupedFeatures& train,
                               const GroupedFeatures& test);
ComparisonTable compare_models(std::span<const ModelSpec> specs, const GroupedFeatures& data);

}  // namespace rlife
