// Copyright 2026 The rlife Authors
// SPDX-License-Identifier: Apache-2.0

#include "rlife/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rlife/error.hpp"
#include "rlife/random.hpp"
#include "rlife/weibull.hpp"

namespace rlife {

namespace {

double round_to(double x, double step) { return std::round(x / step) / std::round(1.0 / step); }

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += csv::format_number(values[i]);
  }
  return out;
}

std::string numbered_id(const char* prefix, int index, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%0*d", prefix, width, index);
  return buf;
}

int id_width(int n) { return n >= 100 ? 3 : 2; }

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(std::string("sim config: ") + what);
}

}  // namespace

// ---------------------------------------------------------------------------
// Renewal

void RenewalSimConfig::validate() const {
  require(n_runs > 0, "n_runs must be positive");
  require(weibull_beta > 0 && weibull_eta_ref > 0, "Weibull parameters must be positive");
  require(reference_load_range_kN > 0, "reference_load_range_kN must be positive");
  require(!load_range_choices.empty(), "load_range_choices must not be empty");
  for (double s : load_range_choices) require(s > 0, "load range choices must be positive");
  require(load_life_exponent > 0, "load_life_exponent must be positive");
  require(load_mean_ratio > 0 && load_mean_jitter_kN >= 0, "load mean parameters invalid");
  require(crack_onset_fraction > 0 && crack_onset_fraction < 1,
          "crack_onset_fraction must be in (0, 1)");
  require(min_crack_duration_s >= 0 && min_life_s > 0, "duration floors invalid");
  require(crack_growth_power > 0, "crack_growth_power must be positive");
  require(window_interval_s > 0, "window_interval_s must be positive");
  require(droop_rate > 0 && droop_rate < 1, "droop_rate must be in (0, 1)");
  require(temp_rise_rate > 0, "temp_rise_rate must be positive");
  require(base_temperature_sd_C >= 0 && load_noise_sd_kN >= 0 && temp_noise_sd_C >= 0,
          "noise levels must be non-negative");
}

RenewalSimConfig RenewalSimConfig::from(const KeyValues& kv) {
  kv.require_known({"n_runs", "weibull_beta", "weibull_eta_ref", "reference_load_range_kN",
                    "load_range_choices", "load_life_exponent", "load_mean_ratio",
                    "load_mean_jitter_kN", "crack_onset_fraction", "min_crack_duration_s",
                    "crack_growth_power", "min_life_s", "window_interval_s", "droop_rate", "temp_rise_rate",
                    "base_temperature_C", "base_temperature_sd_C", "load_noise_sd_kN",
                    "temp_noise_sd_C", "seed"});
  RenewalSimConfig c;
  c.n_runs = static_cast<int>(kv.get_int("n_runs", c.n_runs));
  c.weibull_beta = kv.get_double("weibull_beta", c.weibull_beta);
  c.weibull_eta_ref = kv.get_double("weibull_eta_ref", c.weibull_eta_ref);
  c.reference_load_range_kN = kv.get_double("reference_load_range_kN", c.reference_load_range_kN);
  c.load_range_choices = kv.get_doubles("load_range_choices", c.load_range_choices);
  c.load_life_exponent = kv.get_double("load_life_exponent", c.load_life_exponent);
  c.load_mean_ratio = kv.get_double("load_mean_ratio", c.load_mean_ratio);
  c.load_mean_jitter_kN = kv.get_double("load_mean_jitter_kN", c.load_mean_jitter_kN);
  c.crack_onset_fraction = kv.get_double("crack_onset_fraction", c.crack_onset_fraction);
  c.min_crack_duration_s = kv.get_double("min_crack_duration_s", c.min_crack_duration_s);
  c.crack_growth_power = kv.get_double("crack_growth_power", c.crack_growth_power);
  c.min_life_s = kv.get_double("min_life_s", c.min_life_s);
  c.window_interval_s = kv.get_double("window_interval_s", c.window_interval_s);
  c.droop_rate = kv.get_double("droop_rate", c.droop_rate);
  c.temp_rise_rate = kv.get_double("temp_rise_rate", c.temp_rise_rate);
  c.base_temperature_C = kv.get_double("base_temperature_C", c.base_temperature_C);
  c.base_temperature_sd_C = kv.get_double("base_temperature_sd_C", c.base_temperature_sd_C);
  c.load_noise_sd_kN = kv.get_double("load_noise_sd_kN", c.load_noise_sd_kN);
  c.temp_noise_sd_C = kv.get_double("temp_noise_sd_C", c.temp_noise_sd_C);
  c.seed = kv.get_uint("seed", c.seed);
  c.validate();
  return c;
}

KeyValues RenewalSimConfig::to_key_values() const {
  KeyValues kv;
  const auto num = [&](const char* k, double v) { kv.set(k, csv::format_number(v)); };
  kv.set("n_runs", std::to_string(n_runs));
  num("weibull_beta", weibull_beta);
  num("weibull_eta_ref", weibull_eta_ref);
  num("reference_load_range_kN", reference_load_range_kN);
  kv.set("load_range_choices", join(load_range_choices));
  num("load_life_exponent", load_life_exponent);
  num("load_mean_ratio", load_mean_ratio);
  num("load_mean_jitter_kN", load_mean_jitter_kN);
  num("crack_onset_fraction", crack_onset_fraction);
  num("min_crack_duration_s", min_crack_duration_s);
  num("crack_growth_power", crack_growth_power);
  num("min_life_s", min_life_s);
  num("window_interval_s", window_interval_s);
  num("droop_rate", droop_rate);
  num("temp_rise_rate", temp_rise_rate);
  num("base_temperature_C", base_temperature_C);
  num("base_temperature_sd_C", base_temperature_sd_C);
  num("load_noise_sd_kN", load_noise_sd_kN);
  num("temp_noise_sd_C", temp_noise_sd_C);
  kv.set("seed", std::to_string(seed));
  return kv;
}

namespace {

struct RenewalDraw {
  std::vector<RenewalRun> runs;
  std::vector<RenewalTruth> truth;
};

RenewalDraw draw_renewal(const RenewalSimConfig& cfg) {
  cfg.validate();
  Rng master(derive_seed(cfg.seed, std::string_view("renewal")));

  // Load ranges: without replacement while the pool lasts.
  std::vector<double> loads;
  std::vector<double> pool;
  for (int i = 0; i < cfg.n_runs; ++i) {
    if (pool.empty()) pool = cfg.load_range_choices;
    const auto pick = static_cast<std::size_t>(uniform01(master) * static_cast<double>(pool.size()));
    loads.push_back(pool[pick]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  }

  RenewalDraw out;
  const int width = id_width(cfg.n_runs);
  for (int i = 0; i < cfg.n_runs; ++i) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(i)));
    const double load = loads[static_cast<std::size_t>(i)];
    const double load_ratio = load / cfg.reference_load_range_kN;
    const Weibull<double> life_dist{
        cfg.weibull_beta,
        cfg.weibull_eta_ref * std::pow(1.0 / load_ratio, cfg.load_life_exponent)};
    const double life = std::max(cfg.min_life_s, weibull_quantile(life_dist, uniform01(rng)));
    const double onset = std::max(0.0, std::min(cfg.crack_onset_fraction * life,
                                                life - cfg.min_crack_duration_s));
    const double mean_load = cfg.load_mean_ratio * load + normal(rng, 0.0, cfg.load_mean_jitter_kN);
    const double base_temp = normal(rng, cfg.base_temperature_C, cfg.base_temperature_sd_C);
    const double temp_rise = cfg.temp_rise_rate * load_ratio * load_ratio;

    RenewalRun run;
    run.run_id = numbered_id("run_", i + 1, width);
    for (int k = 0;; ++k) {
      const double t = k * cfg.window_interval_s;
      if (t >= life) break;
      const double progress =
          t <= onset ? 0.0 : std::pow((t - onset) / (life - onset), cfg.crack_growth_power);
      const double droop = 1.0 - cfg.droop_rate * progress;
      MeasurementWindow w;
      w.elapsed_s = t;
      w.load_mean_kN = round_to(mean_load * droop + normal(rng, 0.0, cfg.load_noise_sd_kN), 0.01);
      w.load_range_kN =
          std::max(0.0, round_to(load * droop + normal(rng, 0.0, cfg.load_noise_sd_kN), 0.01));
      w.temperature_C =
          round_to(base_temp + temp_rise * progress + normal(rng, 0.0, cfg.temp_noise_sd_C), 0.01);
      run.windows.push_back(w);
    }
    run.failure_time_s = std::ceil(life / cfg.window_interval_s) * cfg.window_interval_s;
    out.truth.push_back({run.run_id, load, life});
    out.runs.push_back(std::move(run));
  }
  return out;
}

}  // namespace

std::vector<RenewalRun> simulate_renewal(const RenewalSimConfig& cfg) {
  return draw_renewal(cfg).runs;
}

std::vector<RenewalTruth> renewal_truth(const RenewalSimConfig& cfg) {
  return draw_renewal(cfg).truth;
}

// ---------------------------------------------------------------------------
// Pumps

void PumpSimConfig::validate() const {
  require(n_pumps > 0, "n_pumps must be positive");
  require(horizon_days > 0, "horizon_days must be positive");
  require(strong_fraction >= 0 && strong_fraction <= 1, "strong_fraction must be in [0, 1]");
  require(strong_first_life_min > 0 && strong_first_life_excess_mean > 0,
          "strong first-life parameters must be positive");
  require(weak_first_life_mean > 0 && weak_first_life_sd >= 0, "weak first-life parameters invalid");
  require(weak_first_life_min > 0 && weak_first_life_max > weak_first_life_min,
          "weak first-life bounds invalid");
  require(strong_max_events > 0 && weak_max_events > 0, "event caps must be positive");
  require(repair_degradation > 0, "repair_degradation must be positive");
  require(later_life_shape > 0 && later_life_min > 0, "later-life parameters must be positive");
  require(suspension_probability >= 0 && suspension_probability <= 1,
          "suspension_probability must be in [0, 1]");
  require(suspension_lead_min >= 1 && suspension_lead_max >= suspension_lead_min,
          "suspension lead bounds invalid");
  require(sudden_failure_probability >= 0 && sudden_failure_probability <= 1,
          "sudden_failure_probability must be in [0, 1]");
  require(measurement_gap_mean > 0, "measurement_gap_mean must be positive");
  require(min_one_measurement_probability >= 0 && min_one_measurement_probability <= 1,
          "min_one_measurement_probability must be in [0, 1]");
  require(band_baseline > 0 && band_baseline_sd >= 0 && band_repair_growth >= 0 && weak_band_ratio > 0 &&
              band_escalation >= 0 && band_escalation_power > 0 && band_noise_sd >= 0,
          "band parameters invalid");
  require(bearing2_ratio > 0 && bearing2_escalation_ratio >= 0, "bearing 2 ratios invalid");
}

PumpSimConfig PumpSimConfig::from(const KeyValues& kv) {
  kv.require_known({"n_pumps", "horizon_days", "strong_fraction", "strong_first_life_min",
                    "strong_first_life_excess_mean", "weak_first_life_mean", "weak_first_life_sd",
                    "weak_first_life_min", "weak_first_life_max", "strong_max_events",
                    "weak_max_events", "repair_degradation", "later_life_shape", "later_life_min",
                    "suspension_probability", "suspension_lead_min", "suspension_lead_max",
                    "sudden_failure_probability", "measurement_gap_mean",
                    "min_one_measurement_probability", "band_baseline", "band_baseline_sd",
                    "band_repair_growth", "weak_band_ratio", "band_escalation", "band_escalation_power",
                    "band_noise_sd", "bearing2_ratio", "bearing2_escalation_ratio", "band_label",
                    "seed"});
  PumpSimConfig c;
  c.n_pumps = static_cast<int>(kv.get_int("n_pumps", c.n_pumps));
  c.horizon_days = kv.get_double("horizon_days", c.horizon_days);
  c.strong_fraction = kv.get_double("strong_fraction", c.strong_fraction);
  c.strong_first_life_min = kv.get_double("strong_first_life_min", c.strong_first_life_min);
  c.strong_first_life_excess_mean =
      kv.get_double("strong_first_life_excess_mean", c.strong_first_life_excess_mean);
  c.weak_first_life_mean = kv.get_double("weak_first_life_mean", c.weak_first_life_mean);
  c.weak_first_life_sd = kv.get_double("weak_first_life_sd", c.weak_first_life_sd);
  c.weak_first_life_min = kv.get_double("weak_first_life_min", c.weak_first_life_min);
  c.weak_first_life_max = kv.get_double("weak_first_life_max", c.weak_first_life_max);
  c.strong_max_events = static_cast<int>(kv.get_int("strong_max_events", c.strong_max_events));
  c.weak_max_events = static_cast<int>(kv.get_int("weak_max_events", c.weak_max_events));
  c.repair_degradation = kv.get_double("repair_degradation", c.repair_degradation);
  c.later_life_shape = kv.get_double("later_life_shape", c.later_life_shape);
  c.later_life_min = kv.get_double("later_life_min", c.later_life_min);
  c.suspension_probability = kv.get_double("suspension_probability", c.suspension_probability);
  c.suspension_lead_min = kv.get_double("suspension_lead_min", c.suspension_lead_min);
  c.suspension_lead_max = kv.get_double("suspension_lead_max", c.suspension_lead_max);
  c.sudden_failure_probability =
      kv.get_double("sudden_failure_probability", c.sudden_failure_probability);
  c.measurement_gap_mean = kv.get_double("measurement_gap_mean", c.measurement_gap_mean);
  c.min_one_measurement_probability =
      kv.get_double("min_one_measurement_probability", c.min_one_measurement_probability);
  c.band_baseline = kv.get_double("band_baseline", c.band_baseline);
  c.band_baseline_sd = kv.get_double("band_baseline_sd", c.band_baseline_sd);
  c.band_repair_growth = kv.get_double("band_repair_growth", c.band_repair_growth);
  c.weak_band_ratio = kv.get_double("weak_band_ratio", c.weak_band_ratio);
  c.band_escalation = kv.get_double("band_escalation", c.band_escalation);
  c.band_escalation_power = kv.get_double("band_escalation_power", c.band_escalation_power);
  c.band_noise_sd = kv.get_double("band_noise_sd", c.band_noise_sd);
  c.bearing2_ratio = kv.get_double("bearing2_ratio", c.bearing2_ratio);
  c.bearing2_escalation_ratio = kv.get_double("bearing2_escalation_ratio", c.bearing2_escalation_ratio);
  c.band_label = kv.get_string("band_label", c.band_label);
  c.seed = kv.get_uint("seed", c.seed);
  c.validate();
  return c;
}

KeyValues PumpSimConfig::to_key_values() const {
  KeyValues kv;
  const auto num = [&](const char* k, double v) { kv.set(k, csv::format_number(v)); };
  kv.set("n_pumps", std::to_string(n_pumps));
  num("horizon_days", horizon_days);
  num("strong_fraction", strong_fraction);
  num("strong_first_life_min", strong_first_life_min);
  num("strong_first_life_excess_mean", strong_first_life_excess_mean);
  num("weak_first_life_mean", weak_first_life_mean);
  num("weak_first_life_sd", weak_first_life_sd);
  num("weak_first_life_min", weak_first_life_min);
  num("weak_first_life_max", weak_first_life_max);
  kv.set("strong_max_events", std::to_string(strong_max_events));
  kv.set("weak_max_events", std::to_string(weak_max_events));
  num("repair_degradation", repair_degradation);
  num("later_life_shape", later_life_shape);
  num("later_life_min", later_life_min);
  num("suspension_probability", suspension_probability);
  num("suspension_lead_min", suspension_lead_min);
  num("suspension_lead_max", suspension_lead_max);
  num("sudden_failure_probability", sudden_failure_probability);
  num("measurement_gap_mean", measurement_gap_mean);
  num("min_one_measurement_probability", min_one_measurement_probability);
  num("band_baseline", band_baseline);
  num("band_baseline_sd", band_baseline_sd);
  num("band_repair_growth", band_repair_growth);
  num("weak_band_ratio", weak_band_ratio);
  num("band_escalation", band_escalation);
  num("band_escalation_power", band_escalation_power);
  num("band_noise_sd", band_noise_sd);
  num("bearing2_ratio", bearing2_ratio);
  num("bearing2_escalation_ratio", bearing2_escalation_ratio);
  kv.set("band_label", band_label);
  kv.set("seed", std::to_string(seed));
  return kv;
}

namespace {

std::size_t poisson(Rng& rng, double mean) {
  return static_cast<std::size_t>(std::poisson_distribution<int>(mean)(rng));
}

/// Distinct integer days strictly inside (start, end), ascending.
std::vector<double> measurement_days(Rng& rng, double start, double end, std::size_t count) {
  const auto slots = static_cast<std::size_t>(std::max(0.0, end - start - 1.0));
  count = std::min(count, slots);
  std::vector<double> days;
  while (days.size() < count) {
    const double d = start + 1.0 + std::floor(uniform01(rng) * static_cast<double>(slots));
    if (std::find(days.begin(), days.end(), d) == days.end()) days.push_back(d);
  }
  std::sort(days.begin(), days.end());
  return days;
}

}  // namespace

std::vector<PumpHistory> simulate_pumps(const PumpSimConfig& cfg) {
  cfg.validate();
  Rng master(derive_seed(cfg.seed, std::string_view("pumps")));

  // Exactly round(strong_fraction * n) strong pumps, positions shuffled.
  const int n_strong = static_cast<int>(std::lround(cfg.strong_fraction * cfg.n_pumps));
  std::vector<bool> strong(static_cast<std::size_t>(cfg.n_pumps), false);
  std::fill(strong.begin(), strong.begin() + n_strong, true);
  for (std::size_t i = strong.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform01(master) * static_cast<double>(i));
    std::swap(strong[i - 1], strong[j]);
  }

  const double later_scale_factor = 1.0 / std::tgamma(1.0 + 1.0 / cfg.later_life_shape);
  std::vector<PumpHistory> fleet;
  const int width = id_width(cfg.n_pumps);
  for (int p = 0; p < cfg.n_pumps; ++p) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(p)));
    const bool is_strong = strong[static_cast<std::size_t>(p)];
    PumpHistory h;
    h.pump_id = numbered_id("pump_", p + 1, width);

    double first_life = 0.0;
    if (is_strong) {
      first_life = cfg.strong_first_life_min -
                   cfg.strong_first_life_excess_mean * std::log(1.0 - uniform01(rng));
    } else {
      first_life = std::clamp(normal(rng, cfg.weak_first_life_mean, cfg.weak_first_life_sd),
                              cfg.weak_first_life_min, cfg.weak_first_life_max);
    }
    const Weibull<double> later{cfg.later_life_shape,
                                cfg.repair_degradation * first_life * later_scale_factor};
    const double baseline = cfg.band_baseline * (is_strong ? 1.0 : cfg.weak_band_ratio) *
                            std::exp(normal(rng, 0.0, cfg.band_baseline_sd));
    const int max_events = is_strong ? cfg.strong_max_events : cfg.weak_max_events;

    double start = 0.0;
    int repairs = 0;
    while (true) {
      double life = repairs == 0 ? first_life
                                 : std::max(cfg.later_life_min, weibull_quantile(later, uniform01(rng)));
      life = std::max(1.0, std::round(life));
      double end = start + life;
      const bool capped = repairs >= max_events;
      const bool completes = !capped && end <= cfg.horizon_days;

      EventKind kind = EventKind::failure;
      const bool sudden = uniform01(rng) < cfg.sudden_failure_probability;
      if (completes && uniform01(rng) < cfg.suspension_probability) {
        const double lead = std::round(uniform(rng, cfg.suspension_lead_min, cfg.suspension_lead_max));
        if (end - lead > start + 1.0) {
          kind = EventKind::suspension;
          end -= lead;
        }
      }
      const double stop = completes ? end : cfg.horizon_days;

      // Band model over the would-be life; escalation is absent for sudden failures.
      const double level = baseline * std::pow(1.0 + cfg.band_repair_growth, repairs);
      const double escalation = (sudden && kind == EventKind::failure) ? 0.0 : cfg.band_escalation;
      const auto reading = [&](double day) {
        const double u = std::clamp((day - start) / life, 0.0, 1.0);
        const double rise = std::pow(u, cfg.band_escalation_power);
        const double b1 = level * (1.0 + escalation * rise) * std::exp(normal(rng, 0.0, cfg.band_noise_sd));
        const double b2 = level * cfg.bearing2_ratio *
                          (1.0 + cfg.bearing2_escalation_ratio * escalation * rise) *
                          std::exp(normal(rng, 0.0, cfg.band_noise_sd));
        return std::pair{round_to(b1, 0.001), round_to(b2, 0.001)};
      };

      std::size_t count = poisson(rng, (stop - start) / cfg.measurement_gap_mean);
      if (completes && count == 0 && uniform01(rng) < cfg.min_one_measurement_probability) count = 1;
      std::vector<double> days = measurement_days(rng, start, stop, count);
      if (completes && kind == EventKind::suspension) {
        // The reading that prompted the intervention.
        const double trigger = stop - 1.0;
        if (trigger > start && std::find(days.begin(), days.end(), trigger) == days.end()) {
          days.push_back(trigger);
        }
      }
      for (double d : days) {
        if (d <= 0.0 && start == 0.0 && d == start) continue;
        const auto [b1, b2] = reading(d);
        h.events.push_back({h.pump_id, d, EventKind::measurement, b1, b2});
      }
      if (!completes) break;
      h.events.push_back({h.pump_id, stop, kind, std::nullopt, std::nullopt});
      start = stop;
      ++repairs;
    }
    validate(h);
    fleet.push_back(std::move(h));
  }
  return fleet;
}

}  // namespace rlife
