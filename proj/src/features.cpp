// Copyright 2026 The rlife Authors
// SPDX-License-Identifier: Apache-2.0

#include "rlife/features.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "rlife/error.hpp"

namespace rlife {

Eigen::MatrixXd FeatureSet::input_matrix() const {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), arity());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = rows[i].inputs.transpose();
  }
  return x;
}

Eigen::VectorXd FeatureSet::target_vector() const {
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) y(static_cast<Eigen::Index>(i)) = rows[i].target;
  return y;
}

std::vector<FeatureGroup> group_rows(const std::vector<FeatureRow>& rows) {
  std::vector<FeatureGroup> groups;
  std::map<std::string, std::size_t, std::less<>> index;
  for (const auto& row : rows) {
    auto it = index.find(row.provenance.group_id);
    if (it == index.end()) {
      it = index.emplace(row.provenance.group_id, groups.size()).first;
      groups.push_back({row.provenance.group_id, {}});
    }
    groups[it->second].rows.push_back(row);
  }
  return groups;
}

const std::vector<std::string>& renewal_feature_names() {
  static const std::vector<std::string> names = {
      "elapsed_s", "initial_load_mean_kN", "initial_load_range_kN", "load_range_drop_kN",
      "temperature_rise_C"};
  return names;
}

std::vector<FeatureRow> renewal_features(const RenewalRun& run) {
  validate(run);
  const auto& first = run.windows.front();
  std::vector<FeatureRow> rows;
  rows.reserve(run.windows.size());
  for (const auto& w : run.windows) {
    FeatureRow row;
    row.inputs.resize(5);
    row.inputs << w.elapsed_s, first.load_mean_kN, first.load_range_kN,
        first.load_range_kN - w.load_range_kN, w.temperature_C - first.temperature_C;
    row.target = run.failure_time_s - w.elapsed_s;
    row.provenance = {run.run_id, w.elapsed_s};
    rows.push_back(std::move(row));
  }
  return rows;
}

FeatureSet renewal_features(const std::vector<RenewalRun>& runs) {
  FeatureSet set{renewal_feature_names(), {}};
  for (const auto& run : runs) {
    auto rows = renewal_features(run);
    set.rows.insert(set.rows.end(), std::make_move_iterator(rows.begin()),
                    std::make_move_iterator(rows.end()));
  }
  return set;
}

double risk_variable(double days_since_install, std::optional<double> first_failure_day) {
  if (!(days_since_install > 0.0)) throw DomainError("risk_variable: T must be positive");
  if (!first_failure_day) return 1.0;
  if (*first_failure_day > days_since_install) {
    throw DomainError("risk_variable: first failure after observation time");
  }
  const double ratio = *first_failure_day / days_since_install;
  return 0.5 * ratio * ratio;
}

PumpHistory truncate_last_week(const PumpHistory& history, std::vector<std::string>* warnings) {
  validate(history);
  constexpr double kWindowDays = 7.0;
  PumpHistory out{history.pump_id, {}};
  // Walk interval by interval; an interval ends at each failure or suspension.
  std::size_t start = 0;
  const auto& ev = history.events;
  for (std::size_t i = 0; i <= ev.size(); ++i) {
    const bool at_end = i == ev.size();
    if (!at_end && ev[i].kind == EventKind::measurement) continue;
    const bool failure_end = !at_end && ev[i].kind == EventKind::failure;
    std::size_t kept = 0, had = 0;
    for (std::size_t k = start; k < i; ++k) {
      ++had;
      if (failure_end && ev[k].day > ev[i].day - kWindowDays) continue;
      out.events.push_back(ev[k]);
      ++kept;
    }
    if (failure_end && had > 0 && kept == 0 && warnings) {
      warnings->push_back("pump " + history.pump_id + ": interval ending in failure at day " +
                          csv::format_number(ev[i].day) +
                          " lost all measurements to last-week truncation");
    }
    if (!at_end) out.events.push_back(ev[i]);
    start = i + 1;
  }
  return out;
}

std::vector<std::string> pump_feature_names(int n_inputs) {
  if (n_inputs < 3 || n_inputs > 5) throw DomainError("pump features: n_inputs must be 3, 4 or 5");
  std::vector<std::string> names = {"day", "days_since_last_failure", "risk"};
  if (n_inputs >= 4) names.emplace_back("band_avg_brg1");
  if (n_inputs >= 5) names.emplace_back("band_avg_brg2");
  return names;
}

std::vector<FeatureRow> pump_features(const PumpHistory& history, int n_inputs,
                                      PumpFeatureStats* stats) {
  pump_feature_names(n_inputs);
  validate(history);
  std::vector<FeatureRow> rows;
  std::optional<double> first_failure;
  std::optional<double> last_failure;
  std::vector<const PumpEvent*> pending;

  const auto flush = [&](const PumpEvent* terminal) {
    const bool failure = terminal && terminal->kind == EventKind::failure;
    for (const auto* m : pending) {
      if (!failure) {
        if (stats) ++stats->censored_measurements;
        continue;
      }
      FeatureRow row;
      row.inputs.resize(n_inputs);
      row.inputs(0) = m->day;
      row.inputs(1) = m->day - last_failure.value_or(0.0);
      row.inputs(2) = m->day > 0.0 ? risk_variable(m->day, first_failure) : 1.0;
      if (n_inputs >= 4) row.inputs(3) = *m->band_avg_brg1;
      if (n_inputs >= 5) row.inputs(4) = *m->band_avg_brg2;
      row.target = terminal->day - m->day;
      row.provenance = {history.pump_id, m->day};
      rows.push_back(std::move(row));
    }
    pending.clear();
  };

  for (const auto& e : history.events) {
    if (e.kind == EventKind::measurement) {
      pending.push_back(&e);
      continue;
    }
    flush(&e);
    if (e.kind == EventKind::failure) {
      if (!first_failure) first_failure = e.day;
      last_failure = e.day;
    }
  }
  flush(nullptr);
  if (stats) stats->rows += rows.size();
  return rows;
}

FeatureSet pump_features(const std::vector<PumpHistory>& histories, int n_inputs,
                         PumpFeatureStats* stats) {
  FeatureSet set{pump_feature_names(n_inputs), {}};
  for (const auto& h : histories) {
    auto rows = pump_features(h, n_inputs, stats);
    set.rows.insert(set.rows.end(), std::make_move_iterator(rows.begin()),
                    std::make_move_iterator(rows.end()));
  }
  return set;
}

void write_feature_csv(std::ostream& out, const FeatureSet& set) {
  out << "group_id,time";
  for (const auto& name : set.input_names) out << ',' << name;
  out << ",target\n";
  for (const auto& row : set.rows) {
    if (row.inputs.size() != set.arity()) throw DomainError("feature row arity mismatch");
    out << row.provenance.group_id << ',' << csv::format_number(row.provenance.time);
    for (Eigen::Index j = 0; j < row.inputs.size(); ++j) out << ',' << csv::format_number(row.inputs(j));
    out << ',' << csv::format_number(row.target) << '\n';
  }
}

void save_feature_csv(const std::filesystem::path& path, const FeatureSet& set) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write output file " + path.string());
  write_feature_csv(out, set);
}

FeatureSet parse_feature_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!csv::read_line(in, line)) throw ParseError(source, 1, "missing header");
  const auto header = csv::split(line);
  if (header.size() < 4 || header[0] != "group_id" || header[1] != "time" ||
      header.back() != "target") {
    throw ParseError(source, 1, "feature header must be group_id,time,<inputs...>,target");
  }
  FeatureSet set;
  for (std::size_t j = 2; j + 1 < header.size(); ++j) set.input_names.emplace_back(header[j]);
  std::size_t lineno = 1;
  while (csv::read_line(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != header.size()) {
      throw ParseError(source, lineno,
                       "expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(f.size()));
    }
    if (f[0].empty()) throw ParseError(source, lineno, "missing group_id");
    FeatureRow row;
    row.provenance.group_id = std::string(f[0]);
    row.provenance.time = csv::parse_number(f[1], source, lineno, "time");
    row.inputs.resize(set.arity());
    for (Eigen::Index j = 0; j < set.arity(); ++j) {
      row.inputs(j) = csv::parse_number(f[static_cast<std::size_t>(j) + 2], source, lineno,
                                        set.input_names[static_cast<std::size_t>(j)]);
    }
    row.target = csv::parse_number(f.back(), source, lineno, "target");
    if (row.target < 0.0) throw ParseError(source, lineno, "negative residual-life target");
    set.rows.push_back(std::move(row));
  }
  return set;
}

FeatureSet load_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open input file " + path.string());
  return parse_feature_csv(in, path.string());
}

}  // namespace rlife
