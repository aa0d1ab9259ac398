// Copyright 2026 The rlife Authors
// SPDX-License-Identifier: Apache-2.0

#include "rlife/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

#include "rlife/error.hpp"
#include "rlife/random.hpp"

namespace rlife {

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::gd: return "gd";
    case EstimatorKind::lm: return "lm";
    case EstimatorKind::lmbr: return "lmbr";
    case EstimatorKind::grnn: return "grnn";
    case EstimatorKind::weibull_baseline: return "weibull-baseline";
  }
  return "?";
}

EstimatorKind parse_estimator_kind(std::string_view name) {
  if (name == "gd") return EstimatorKind::gd;
  if (name == "lm") return EstimatorKind::lm;
  if (name == "lmbr") return EstimatorKind::lmbr;
  if (name == "grnn") return EstimatorKind::grnn;
  if (name == "weibull-baseline" || name == "weibull") return EstimatorKind::weibull_baseline;
  throw DomainError("unknown model kind '" + std::string(name) + "'");
}

std::string ModelSpec::display_name() const {
  return label.empty() ? std::string(to_string(kind)) : label;
}

bool ModelSpec::is_mlp() const {
  return kind == EstimatorKind::gd || kind == EstimatorKind::lm || kind == EstimatorKind::lmbr;
}

std::size_t GroupedFeatures::row_count() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.rows.size();
  return n;
}

FeatureSet GroupedFeatures::flatten() const {
  FeatureSet set{input_names, {}};
  set.rows.reserve(row_count());
  for (const auto& g : groups) set.rows.insert(set.rows.end(), g.rows.begin(), g.rows.end());
  return set;
}

GroupedFeatures group_features(const FeatureSet& set) {
  return {set.input_names, group_rows(set.rows)};
}

GroupedFeatures select_groups(const GroupedFeatures& data, std::span<const std::string> ids) {
  GroupedFeatures out{data.input_names, {}};
  for (const auto& id : ids) {
    const auto it = std::find_if(data.groups.begin(), data.groups.end(),
                                 [&](const FeatureGroup& g) { return g.id == id; });
    if (it == data.groups.end()) throw DomainError("unknown group id '" + id + "'");
    out.groups.push_back(*it);
  }
  return out;
}

GroupedFeatures exclude_groups(const GroupedFeatures& data, std::span<const std::string> ids) {
  GroupedFeatures out{data.input_names, {}};
  for (const auto& g : data.groups) {
    if (std::find(ids.begin(), ids.end(), g.id) == ids.end()) out.groups.push_back(g);
  }
  return out;
}

namespace {

Eigen::Index default_age_column(const std::vector<std::string>& names) {
  for (const char* candidate : {"days_since_last_failure", "elapsed_s"}) {
    const auto it = std::find(names.begin(), names.end(), candidate);
    if (it != names.end()) return static_cast<Eigen::Index>(it - names.begin());
  }
  return 0;
}

Weibull<double> fit_baseline(const FeatureSet& train, Eigen::Index age_column) {
  // One life per distinct (group, failure instant); age + residual is the
  // same for every row observed within one life.
  std::vector<std::pair<std::string, double>> seen;
  std::vector<double> lives;
  for (const auto& row : train.rows) {
    const double life = row.inputs(age_column) + row.target;
    const bool dup = std::any_of(seen.begin(), seen.end(), [&](const auto& s) {
      return s.first == row.provenance.group_id &&
             std::abs(s.second - life) <= 1e-9 * std::max(1.0, std::abs(life));
    });
    if (dup) continue;
    seen.emplace_back(row.provenance.group_id, life);
    lives.push_back(life);
  }
  return fit_weibull_mle<double>(lives);
}

}  // namespace

TrainedModel train_model(const FeatureSet& train, const ModelSpec& spec) {
  if (train.rows.empty()) throw DomainError("train_model: empty training set");
  const Eigen::Index n_used = spec.n_inputs > 0 ? spec.n_inputs : train.arity();
  if (n_used > train.arity()) {
    throw DomainError("train_model: spec asks for " + std::to_string(n_used) +
                      " inputs but data has " + std::to_string(train.arity()));
  }

  TrainedModel model;
  model.spec = spec;
  model.spec.n_inputs = n_used;
  model.input_names.assign(train.input_names.begin(), train.input_names.begin() + n_used);
  model.age_column = spec.age_column.value_or(default_age_column(train.input_names));

  const Eigen::MatrixXd x = train.input_matrix().leftCols(n_used);
  const Eigen::VectorXd y = train.target_vector();
  const std::string target_name[] = {"target"};
  model.normalizer.target = fit_scaler(y, target_name);

  if (spec.kind == EstimatorKind::weibull_baseline) {
    if (model.age_column < 0 || model.age_column >= train.arity()) {
      throw DomainError("weibull-baseline: age column out of range");
    }
    model.estimator = fit_baseline(train, model.age_column);
    return model;
  }

  model.normalizer.inputs = fit_scaler(x, model.input_names);
  const Eigen::MatrixXd xn = model.normalizer.inputs.normalize_rows(x);
  const Eigen::VectorXd yn = model.normalizer.target.normalize_rows(y);

  if (spec.kind == EstimatorKind::grnn) {
    model.estimator = grnn_build(xn, yn, spec.spread);
    return model;
  }

  MlpLayout layout{n_used, spec.n_hidden, Transfer::log_sigmoid, spec.output_transfer};
  layout.validate();
  const auto verdict = check_conditioning(layout, xn.rows());
  if (!verdict.ok) throw ConditioningError(verdict);
  auto init = mlp_init<double>(layout, spec.seed);
  TrainResult<double> result;
  switch (spec.kind) {
    case EstimatorKind::gd: result = train_gd_momentum(std::move(init), xn, yn, spec.gd); break;
    case EstimatorKind::lm: result = train_lm(std::move(init), xn, yn, spec.lm); break;
    default: result = train_lmbr(std::move(init), xn, yn, spec.lm); break;
  }
  model.estimator = std::move(result.model);
  model.history = std::move(result.history);
  return model;
}

double TrainedModel::predict(const Eigen::VectorXd& raw_inputs) const {
  if (const auto* w = std::get_if<Weibull<double>>(&estimator)) {
    if (age_column >= raw_inputs.size()) throw DomainError("predict: missing age column");
    return weibull_baseline_residual(*w, raw_inputs(age_column));
  }
  const auto n = normalizer.inputs.size();
  if (raw_inputs.size() < n) {
    throw DomainError("predict: expected " + std::to_string(n) + " inputs, got " +
                      std::to_string(raw_inputs.size()));
  }
  const Eigen::VectorXd xn = normalizer.inputs.normalize(raw_inputs.head(n));
  double yn = 0.0;
  if (const auto* g = std::get_if<Grnn<double>>(&estimator)) {
    yn = grnn_predict(*g, xn);
  } else {
    yn = mlp_forward_one(std::get<Mlp<double>>(estimator), xn);
  }
  return normalizer.denormalize_target(yn);
}

Eigen::VectorXd TrainedModel::predict_rows(const Eigen::MatrixXd& raw_inputs) const {
  Eigen::VectorXd out(raw_inputs.rows());
  for (Eigen::Index i = 0; i < raw_inputs.rows(); ++i) out(i) = predict(raw_inputs.row(i).transpose());
  return out;
}

Metrics metrics(std::span<const double> predicted, std::span<const double> actual,
                const MinMaxScaler<double>& target) {
  if (predicted.size() != actual.size()) throw DomainError("metrics: length mismatch");
  if (predicted.empty()) throw DomainError("metrics: no observations");
  Metrics m;
  m.count = predicted.size();
  double sq_norm = 0.0, abs_sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double e = predicted[i] - actual[i];
    const double en = target.normalize(0, predicted[i]) - target.normalize(0, actual[i]);
    sq_norm += en * en;
    abs_sum += std::abs(e);
    m.max_abs = std::max(m.max_abs, std::abs(e));
    m.sse += e * e;
  }
  m.mse = sq_norm / static_cast<double>(m.count);
  m.mean_abs = abs_sum / static_cast<double>(m.count);
  return m;
}

Metrics recompute_metrics(const EvalReport& report) {
  std::vector<double> p, a;
  for (const auto& o : report.observations) {
    p.push_back(o.predicted);
    a.push_back(o.actual);
  }
  return metrics(p, a, report.target_scaler);
}

EvalReport evaluate(const TrainedModel& model, const FeatureSet& data) {
  if (data.rows.empty()) throw DomainError("evaluate: no observations");
  EvalReport report;
  report.target_scaler = model.normalizer.target;
  report.observations.reserve(data.rows.size());
  for (const auto& row : data.rows) {
    Observation o;
    o.provenance = row.provenance;
    o.predicted = model.predict(row.inputs);
    o.actual = row.target;
    o.error = o.predicted - o.actual;
    report.observations.push_back(std::move(o));
  }
  report.metrics = recompute_metrics(report);
  return report;
}

std::vector<GroupError> first_row_relative_errors(const EvalReport& report) {
  std::vector<GroupError> out;
  std::vector<const Observation*> first;
  for (const auto& o : report.observations) {
    auto it = std::find_if(first.begin(), first.end(), [&](const Observation* f) {
      return f->provenance.group_id == o.provenance.group_id;
    });
    if (it == first.end()) {
      first.push_back(&o);
    } else if (o.provenance.time < (*it)->provenance.time) {
      *it = &o;
    }
  }
  for (const auto* o : first) {
    if (o->actual > 0.0) out.push_back({o->provenance.group_id, std::abs(o->error) / o->actual});
  }
  return out;
}

StaticSplitResult static_split_eval(const GroupedFeatures& train, const GroupedFeatures& test,
                                    const ModelSpec& spec) {
  std::set<std::string> ids;
  for (const auto& g : train.groups) ids.insert(g.id);
  for (const auto& g : test.groups) {
    if (ids.count(g.id)) throw DomainError("static split: group '" + g.id + "' on both sides");
  }
  if (train.input_names != test.input_names) {
    throw DomainError("static split: train/test column layouts differ");
  }
  StaticSplitResult r{train_model(train.flatten(), spec), {}, {}};
  r.train = evaluate(r.model, train.flatten());
  r.test = evaluate(r.model, test.flatten());
  return r;
}

CvReport cross_validate(const GroupedFeatures& data, const ModelSpec& spec) {
  if (data.groups.size() < 2) throw DomainError("cross_validate: need at least 2 groups");
  std::vector<const FeatureGroup*> sorted;
  for (const auto& g : data.groups) sorted.push_back(&g);
  std::sort(sorted.begin(), sorted.end(),
            [](const FeatureGroup* a, const FeatureGroup* b) { return a->id < b->id; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->id == sorted[i - 1]->id) {
      throw DomainError("cross_validate: duplicate group id '" + sorted[i]->id + "'");
    }
  }

  CvReport report;
  for (const auto* held_out : sorted) {
    if (held_out->rows.empty()) throw DomainError("cross_validate: group '" + held_out->id + "' is empty");
    FeatureSet train{data.input_names, {}};
    for (const auto* g : sorted) {
      if (g != held_out) train.rows.insert(train.rows.end(), g->rows.begin(), g->rows.end());
    }
    ModelSpec fold_spec = spec;
    fold_spec.seed = derive_seed(spec.seed, held_out->id);
    CvFold fold{held_out->id, fold_spec.seed, train_model(train, fold_spec), {}};
    fold.test = evaluate(fold.model, FeatureSet{data.input_names, held_out->rows});
    report.total_sse += fold.test.metrics.sse;
    report.folds.push_back(std::move(fold));
  }
  return report;
}

std::string_view to_string(Protocol p) {
  return p == Protocol::static_split ? "static" : "cv";
}

Protocol parse_protocol(std::string_view name) {
  if (name == "static") return Protocol::static_split;
  if (name == "cv") return Protocol::cross_validation;
  throw DomainError("unknown protocol '" + std::string(name) + "'");
}

namespace {

void sort_rows(std::vector<ComparisonRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ComparisonRow& a, const ComparisonRow& b) { return a.score < b.score; });
}

Metrics pooled_metrics(const CvReport& cv) {
  Metrics m;
  double sq_norm = 0.0, abs_sum = 0.0;
  for (const auto& fold : cv.folds) {
    for (const auto& o : fold.test.observations) {
      const auto& s = fold.test.target_scaler;
      const double en = s.normalize(0, o.predicted) - s.normalize(0, o.actual);
      sq_norm += en * en;
      abs_sum += std::abs(o.error);
      m.max_abs = std::max(m.max_abs, std::abs(o.error));
      m.sse += o.error * o.error;
      ++m.count;
    }
  }
  if (m.count > 0) {
    m.mse = sq_norm / static_cast<double>(m.count);
    m.mean_abs = abs_sum / static_cast<double>(m.count);
  }
  return m;
}

}  // namespace

ComparisonTable compare_models(std::span<const ModelSpec> specs, const GroupedFeatures& train,
                               const GroupedFeatures& test) {
  if (specs.size() < 2) throw DomainError("compare_models: need at least 2 model specs");
  ComparisonTable table{Protocol::static_split, {}};
  for (const auto& spec : specs) {
    const auto r = static_split_eval(train, test, spec);
    ComparisonRow row{spec.display_name(), r.test.metrics.mse, r.train.metrics, r.test.metrics, {}};
    const auto errs = first_row_relative_errors(r.test);
    if (!errs.empty()) {
      const auto [lo, hi] = std::minmax_element(
          errs.begin(), errs.end(),
          [](const GroupError& a, const GroupError& b) { return a.relative_error < b.relative_error; });
      row.first_row_error_range = {lo->relative_error, hi->relative_error};
    }
    table.rows.push_back(std::move(row));
  }
  sort_rows(table.rows);
  return table;
}

ComparisonTable compare_models(std::span<const ModelSpec> specs, const GroupedFeatures& data) {
  if (specs.size() < 2) throw DomainError("compare_models: need at least 2 model specs");
  ComparisonTable table{Protocol::cross_validation, {}};
  for (const auto& spec : specs) {
    const auto cv = cross_validate(data, spec);
    ComparisonRow row{spec.display_name(), cv.total_sse, {}, pooled_metrics(cv), {}};
    table.rows.push_back(std::move(row));
  }
  sort_rows(table.rows);
  return table;
}

std::string ComparisonTable::render() const {
  std::string out;
  char buf[256];
  if (protocol == Protocol::cross_validation) {
    std::snprintf(buf, sizeof(buf), "%-4s  %-24s  %14s  %12s  %12s  %6s\n", "rank", "model",
                  "test_sse", "test_mean_abs", "test_max_abs", "n");
    out += buf;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      std::snprintf(buf, sizeof(buf), "%-4zu  %-24s  %14.6e  %12.6g  %12.6g  %6zu\n", i + 1,
                    r.label.c_str(), r.score, r.test.mean_abs, r.test.max_abs, r.test.count);
      out += buf;
    }
  } else {
    std::snprintf(buf, sizeof(buf), "%-4s  %-24s  %12s  %12s  %12s  %12s  %12s  %12s  %s\n",
                  "rank", "model", "test_mse", "train_mse", "train_mean", "test_mean",
                  "train_max", "test_max", "first_row_error");
    out += buf;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      std::string range = "-";
      if (r.first_row_error_range) {
        char rb[64];
        std::snprintf(rb, sizeof(rb), "%.1f%% - %.1f%%", 100.0 * r.first_row_error_range->first,
                      100.0 * r.first_row_error_range->second);
        range = rb;
      }
      std::snprintf(buf, sizeof(buf),
                    "%-4zu  %-24s  %12.4e  %12.4e  %12.6g  %12.6g  %12.6g  %12.6g  %s\n", i + 1,
                    r.label.c_str(), r.score, r.train.mse, r.train.mean_abs, r.test.mean_abs,
                    r.train.max_abs, r.test.max_abs, range.c_str());
      out += buf;
    }
  }
  return out;
}

}  // namespace rlife
