// Copyright 2026 The rlife Authors
// SPDX-License-Identifier: Apache-2.0

#include "rlife/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "rlife/error.hpp"

namespace rlife {

namespace csv {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

double parse_number(std::string_view field, const std::string& source, std::size_t line,
                    std::string_view column) {
  double value = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ParseError(source, line,
                     "invalid number '" + std::string(field) + "' in column " +
                         std::string(column));
  }
  return value;
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

}  // namespace csv

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::measurement: return "measurement";
    case EventKind::failure: return "failure";
    case EventKind::suspension: return "suspension";
  }
  return "?";
}

void validate(const RenewalRun& run) {
  if (run.windows.empty()) throw DomainError("run " + run.run_id + ": no measurement windows");
  double prev = -1.0;
  for (const auto& w : run.windows) {
    if (w.elapsed_s < 0.0) throw DomainError("run " + run.run_id + ": negative elapsed_s");
    if (w.load_range_kN < 0.0) throw DomainError("run " + run.run_id + ": negative load range");
    if (!(w.elapsed_s > prev)) {
      throw DomainError("run " + run.run_id + ": windows not strictly increasing in elapsed_s");
    }
    prev = w.elapsed_s;
  }
  if (run.failure_time_s < run.windows.back().elapsed_s) {
    throw DomainError("run " + run.run_id + ": failure time precedes last window");
  }
}

void validate(const PumpHistory& history) {
  double prev = -1.0;
  for (const auto& e : history.events) {
    if (e.pump_id != history.pump_id) {
      throw DomainError("pump " + history.pump_id + ": foreign event for " + e.pump_id);
    }
    if (e.day < 0.0) throw DomainError("pump " + history.pump_id + ": negative day");
    if (!(e.day > prev)) {
      throw DomainError("pump " + history.pump_id + ": events not strictly increasing in day");
    }
    prev = e.day;
    const bool has_bands = e.band_avg_brg1.has_value() || e.band_avg_brg2.has_value();
    if (e.kind == EventKind::measurement) {
      if (!e.band_avg_brg1 || !e.band_avg_brg2) {
        throw DomainError("pump " + history.pump_id + ": measurement without band averages");
      }
      if (*e.band_avg_brg1 < 0.0 || *e.band_avg_brg2 < 0.0) {
        throw DomainError("pump " + history.pump_id + ": negative band average");
      }
    } else if (has_bands) {
      throw DomainError("pump " + history.pump_id + ": " + std::string(to_string(e.kind)) +
                        " event carries band averages");
    }
  }
}

namespace {

constexpr std::string_view kRenewalHeader =
    "run_id,elapsed_s,load_mean_kN,load_range_kN,temperature_C";
constexpr std::string_view kRenewalExtra = ",accel_rms,strain_range";
constexpr std::string_view kPumpHeader = "pump_id,day,kind,band_avg_brg1,band_avg_brg2";

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open input file " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write output file " + path.string());
  return out;
}

std::optional<double> optional_number(std::string_view field, const std::string& source,
                                      std::size_t line, std::string_view column) {
  if (field.empty()) return std::nullopt;
  return csv::parse_number(field, source, line, column);
}

}  // namespace

std::vector<RenewalRun> parse_renewal_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  if (!csv::read_line(in, line)) throw ParseError(source, 1, "missing header");
  ++lineno;
  bool extended = false;
  if (line == std::string(kRenewalHeader) + std::string(kRenewalExtra)) {
    extended = true;
  } else if (line != kRenewalHeader) {
    throw ParseError(source, lineno, "unexpected header '" + line + "'");
  }
  const std::size_t width = extended ? 7 : 5;

  std::vector<RenewalRun> runs;
  std::map<std::string, std::size_t, std::less<>> index;
  std::vector<bool> closed;

  while (csv::read_line(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.empty() || f[0].empty()) throw ParseError(source, lineno, "missing run_id");
    const std::string id(f[0]);
    auto it = index.find(id);
    if (it == index.end()) {
      it = index.emplace(id, runs.size()).first;
      runs.push_back(RenewalRun{id, {}, 0.0});
      closed.push_back(false);
    }
    auto& run = runs[it->second];
    if (closed[it->second]) {
      throw ParseError(source, lineno, "row for run " + id + " after its failure trailer");
    }

    if (f.size() >= 2 && f[1] == "FAILURE") {
      if (f.size() != 5 && f.size() != width) {
        throw ParseError(source, lineno, "malformed failure trailer");
      }
      for (std::size_t k = 3; k < f.size(); ++k) {
        if (!f[k].empty()) throw ParseError(source, lineno, "malformed failure trailer");
      }
      run.failure_time_s = csv::parse_number(f[2], source, lineno, "failure_time_s");
      if (run.windows.empty()) {
        throw ParseError(source, lineno, "failure trailer for run " + id + " has no windows");
      }
      if (run.failure_time_s < run.windows.back().elapsed_s) {
        throw ParseError(source, lineno, "failure time precedes last window of run " + id);
      }
      closed[it->second] = true;
      continue;
    }

    if (f.size() != width) {
      throw ParseError(source, lineno,
                       "expected " + std::to_string(width) + " fields, got " +
                           std::to_string(f.size()));
    }
    MeasurementWindow w;
    w.elapsed_s = csv::parse_number(f[1], source, lineno, "elapsed_s");
    w.load_mean_kN = csv::parse_number(f[2], source, lineno, "load_mean_kN");
    w.load_range_kN = csv::parse_number(f[3], source, lineno, "load_range_kN");
    w.temperature_C = csv::parse_number(f[4], source, lineno, "temperature_C");
    if (extended) {
      w.accel_rms = optional_number(f[5], source, lineno, "accel_rms");
      w.strain_range = optional_number(f[6], source, lineno, "strain_range");
    }
    if (w.elapsed_s < 0.0) throw ParseError(source, lineno, "negative elapsed_s");
    if (w.load_range_kN < 0.0) throw ParseError(source, lineno, "negative load_range_kN");
    if (!run.windows.empty() && !(w.elapsed_s > run.windows.back().elapsed_s)) {
      throw ParseError(source, lineno, "non-monotonic elapsed_s within run " + id);
    }
    run.windows.push_back(w);
  }

  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!closed[i]) {
      throw ParseError(source, lineno, "missing failure trailer for run " + runs[i].run_id);
    }
  }
  return runs;
}

std::vector<RenewalRun> load_renewal_runs(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_renewal_csv(in, path.string());
}

void write_renewal_csv(std::ostream& out, const std::vector<RenewalRun>& runs) {
  bool extended = false;
  for (const auto& run : runs) {
    for (const auto& w : run.windows) extended |= w.accel_rms.has_value() || w.strain_range.has_value();
  }
  out << kRenewalHeader << (extended ? kRenewalExtra : "") << '\n';
  const auto opt = [](const std::optional<double>& v) {
    return v ? csv::format_number(*v) : std::string();
  };
  for (const auto& run : runs) {
    validate(run);
    for (const auto& w : run.windows) {
      out << run.run_id << ',' << csv::format_number(w.elapsed_s) << ','
          << csv::format_number(w.load_mean_kN) << ',' << csv::format_number(w.load_range_kN)
          << ',' << csv::format_number(w.temperature_C);
      if (extended) out << ',' << opt(w.accel_rms) << ',' << opt(w.strain_range);
      out << '\n';
    }
    out << run.run_id << ",FAILURE," << csv::format_number(run.failure_time_s) << ",,"
        << (extended ? ",," : "") << '\n';
  }
}

void save_renewal_runs(const std::filesystem::path& path, const std::vector<RenewalRun>& runs) {
  auto out = open_output(path);
  write_renewal_csv(out, runs);
}

std::vector<PumpHistory> parse_pump_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  if (!csv::read_line(in, line)) throw ParseError(source, 1, "missing header");
  ++lineno;
  if (line != kPumpHeader) throw ParseError(source, lineno, "unexpected header '" + line + "'");

  std::vector<PumpHistory> histories;
  std::map<std::string, std::size_t, std::less<>> index;
  while (csv::read_line(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 5) {
      throw ParseError(source, lineno, "expected 5 fields, got " + std::to_string(f.size()));
    }
    if (f[0].empty()) throw ParseError(source, lineno, "missing pump_id");
    PumpEvent e;
    e.pump_id = std::string(f[0]);
    e.day = csv::parse_number(f[1], source, lineno, "day");
    if (e.day < 0.0) throw ParseError(source, lineno, "negative day");
    if (f[2] == "measurement") {
      e.kind = EventKind::measurement;
      e.band_avg_brg1 = csv::parse_number(f[3], source, lineno, "band_avg_brg1");
      e.band_avg_brg2 = csv::parse_number(f[4], source, lineno, "band_avg_brg2");
      if (*e.band_avg_brg1 < 0.0 || *e.band_avg_brg2 < 0.0) {
        throw ParseError(source, lineno, "negative band average");
      }
    } else if (f[2] == "failure" || f[2] == "suspension") {
      e.kind = f[2] == "failure" ? EventKind::failure : EventKind::suspension;
      if (!f[3].empty() || !f[4].empty()) {
        throw ParseError(source, lineno, std::string(f[2]) + " row carries band averages");
      }
    } else {
      throw ParseError(source, lineno, "unknown event kind '" + std::string(f[2]) + "'");
    }

    auto it = index.find(e.pump_id);
    if (it == index.end()) {
      it = index.emplace(e.pump_id, histories.size()).first;
      histories.push_back(PumpHistory{e.pump_id, {}});
    }
    auto& h = histories[it->second];
    if (!h.events.empty() && !(e.day > h.events.back().day)) {
      throw ParseError(source, lineno, "non-monotonic day within pump " + e.pump_id);
    }
    h.events.push_back(std::move(e));
  }
  return histories;
}

std::vector<PumpHistory> load_pump_histories(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_pump_csv(in, path.string());
}

void write_pump_csv(std::ostream& out, const std::vector<PumpHistory>& histories) {
  out << kPumpHeader << '\n';
  for (const auto& h : histories) {
    validate(h);
    for (const auto& e : h.events) {
      out << h.pump_id << ',' << csv::format_number(e.day) << ',' << to_string(e.kind) << ',';
      if (e.kind == EventKind::measurement) {
        out << csv::format_number(*e.band_avg_brg1) << ',' << csv::format_number(*e.band_avg_brg2);
      } else {
        out << ',';
      }
      out << '\n';
    }
  }
}

void save_pump_histories(const std::filesystem::path& path,
                         const std::vector<PumpHistory>& histories) {
  auto out = open_output(path);
  write_pump_csv(out, histories);
}

}  // namespace rlife
