// Copyright 2026 The rlife Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rlife {

/// Summary statistics for one three-second recording window of a fatigue run.
struct MeasurementWindow {
  double elapsed_s = 0.0;
  double load_mean_kN = 0.0;
  double load_range_kN = 0.0;
  double temperature_C = 0.0;
  // Carried through I/O only; feature extraction does not read them.
  std::optional<double> accel_rms;
  std::optional<double> strain_range;

  bool operator==(const MeasurementWindow&) const = default;
};

/// One test piece: its window sequence and the time of the first
/// measurement after failure.
struct RenewalRun {
  std::string run_id;
  std::vector<MeasurementWindow> windows;
  double failure_time_s = 0.0;

  bool operator==(const RenewalRun&) const = default;
};

enum class EventKind { measurement, failure, suspension };

std::string_view to_string(EventKind kind);

struct PumpEvent {
  std::string pump_id;
  double day = 0.0;
  EventKind kind = EventKind::measurement;
  // Present iff kind == measurement.
  std::optional<double> band_avg_brg1;
  std::optional<double> band_avg_brg2;

  bool operator==(const PumpEvent&) const = default;
};

struct PumpHistory {
  std::string pump_id;
  std::vector<PumpEvent> events;

  bool operator==(const PumpHistory&) const = default;
};

/// Throws DomainError when a type invariant does not hold.
void validate(const RenewalRun& run);
void validate(const PumpHistory& history);

// Renewal CSV:
//   run_id,elapsed_s,load_mean_kN,load_range_kN,temperature_C[,accel_rms,strain_range]
// followed, per run, by a trailer row `run_id,FAILURE,<failure_time_s>,,`.
std::vector<RenewalRun> parse_renewal_csv(std::istream& in, const std::string& source = "<stream>");
std::vector<RenewalRun> load_renewal_runs(const std::filesystem::path& path);
void write_renewal_csv(std::ostream& out, const std::vector<RenewalRun>& runs);
void save_renewal_runs(const std::filesystem::path& path, const std::vector<RenewalRun>& runs);

// Pump CSV: pump_id,day,kind,band_avg_brg1,band_avg_brg2
std::vector<PumpHistory> parse_pump_csv(std::istream& in, const std::string& source = "<stream>");
std::vector<PumpHistory> load_pump_histories(const std::filesystem::path& path);
void write_pump_csv(std::ostream& out, const std::vector<PumpHistory>& histories);
void save_pump_histories(const std::filesystem::path& path,
                         const std::vector<PumpHistory>& histories);

namespace csv {

/// Split one CSV line on commas. No quoting: none of our schemas need it.
std::vector<std::string_view> split(std::string_view line);

/// Parse a finite double; throws ParseError naming `source:line`.
double parse_number(std::string_view field, const std::string& source, std::size_t line,
                    std::string_view column);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

/// Reads lines, stripping a trailing '\r'. Returns false at EOF.
bool read_line(std::istream& in, std::string& line);

}  // namespace csv

}  // namespace rlife
