// Copyright 2026 The rlife Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rlife/config.hpp"
#include "rlife/dataset.hpp"

namespace rlife {

/// Fatigue-rig stand-in. Each run gets its own load range; its life is
/// Weibull(weibull_beta, eta_ref * (S_ref / S)^m). Windows every
/// `window_interval_s` until failure; load range droops and temperature
/// climbs once the crack starts.
///
/// Scatter at any single load is small (large weibull_beta). Most of the
/// spread in life comes from the load ranges, which are chosen so that the
/// pooled failure times of one dataset fit roughly Weibull(1.75, 8970 s).
struct RenewalSimConfig {
  int n_runs = 12;
  double weibull_beta = 20.0;       // scatter at a fixed load
  double weibull_eta_ref = 7410.0;  // s, at reference_load_range_kN
  double reference_load_range_kN = 300.0;
  // Sampled without replacement while choices remain, then with replacement.
  std::vector<double> load_range_choices = {210, 250, 265, 280, 290, 300,
                                            310, 320, 335, 350, 400, 520};
  double load_life_exponent = 3.0;
  double load_mean_ratio = 1.0;  // mean load relative to load range
  double load_mean_jitter_kN = 0.0;
  double crack_onset_fraction = 0.8;
  double min_crack_duration_s = 540.0;
  double crack_growth_power = 1.0;  // shape of droop and temperature rise after onset
  double min_life_s = 900.0;
  double window_interval_s = 180.0;
  double droop_rate = 0.12;     // fraction of load range lost by failure
  double temp_rise_rate = 40.0; // temperature rise at failure (C), at the reference load
  double base_temperature_C = 22.0;
  double base_temperature_sd_C = 1.5;
  double load_noise_sd_kN = 0.5;
  double temp_noise_sd_C = 0.2;
  std::uint64_t seed = 1;

  void validate() const;
  static RenewalSimConfig from(const KeyValues& kv);
  KeyValues to_key_values() const;
};

/// Pump-fleet stand-in: two subpopulations, imperfect repair, sparse
/// vibration readings that escalate towards failure.
struct PumpSimConfig {
  int n_pumps = 8;
  double horizon_days = 791.0;
  double strong_fraction = 0.625;
  double strong_first_life_min = 500.0;
  double strong_first_life_excess_mean = 36.0;  // exponential excess over the minimum
  double weak_first_life_mean = 357.0;
  double weak_first_life_sd = 60.0;
  double weak_first_life_min = 150.0;
  double weak_first_life_max = 495.0;
  int strong_max_events = 2;
  int weak_max_events = 4;
  double repair_degradation = 0.35;  // later-life mean as a fraction of the pump's first life
  double later_life_shape = 2.5;
  double later_life_min = 20.0;
  double suspension_probability = 0.15;
  double suspension_lead_min = 2.0;
  double suspension_lead_max = 10.0;
  double sudden_failure_probability = 0.1;
  double measurement_gap_mean = 90.0;
  double min_one_measurement_probability = 0.95;
  double band_baseline = 1.0;
  double band_baseline_sd = 0.2;     // log-normal spread across pumps
  double band_repair_growth = 0.15;  // baseline growth per repair
  double weak_band_ratio = 1.5;      // weak pumps run rougher from installation
  double band_escalation = 4.0;      // relative rise at the end of an interval
  double band_escalation_power = 2.0;
  double band_noise_sd = 0.1;        // log-normal measurement noise
  double bearing2_ratio = 0.8;
  double bearing2_escalation_ratio = 0.7;
  std::string band_label = "1xRPM";
  std::uint64_t seed = 1;

  void validate() const;
  static PumpSimConfig from(const KeyValues& kv);
  KeyValues to_key_values() const;
};

std::vector<RenewalRun> simulate_renewal(const RenewalSimConfig& cfg);
std::vector<PumpHistory> simulate_pumps(const PumpSimConfig& cfg);

/// Per-run ground truth, exposed for calibration checks.
struct RenewalTruth {
  std::string run_id;
  double load_range_kN;
  double life_s;  // continuous failure instant before grid snapping
};

std::vector<RenewalTruth> renewal_truth(const RenewalSimConfig& cfg);

}  // namespace rlife
