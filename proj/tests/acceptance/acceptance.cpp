// Copyright 2026 The rlife Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rlife/cli.hpp"
#include "rlife/eval.hpp"
#include "rlife/features.hpp"
#include "rlife/grnn.hpp"
#include "rlife/mlp.hpp"
#include "rlife/random.hpp"
#include "rlife/sim.hpp"
#include "rlife/weibull.hpp"

namespace {

using namespace rlife;
namespace fs = std::filesystem;

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

std::string tally(int hits, int total) {
  return std::to_string(hits) + "/" + std::to_string(total) + " seeds";
}

constexpr int kSeeds = 20;
constexpr int kNeeded = 14;

GroupedFeatures renewal_data(std::uint64_t seed) {
  RenewalSimConfig cfg;
  cfg.seed = seed;
  return group_features(renewal_features(simulate_renewal(cfg)));
}

GroupedFeatures pump_data(std::uint64_t seed, int n_inputs) {
  PumpSimConfig cfg;
  cfg.seed = seed;
  std::vector<PumpHistory> truncated;
  for (const auto& h : simulate_pumps(cfg)) truncated.push_back(truncate_last_week(h));
  return group_features(pump_features(truncated, n_inputs));
}

// Last three simulated runs held out.
std::vector<std::string> tail_test_ids(const GroupedFeatures& d) {
  const auto n = d.groups.size();
  return {d.groups[n - 3].id, d.groups[n - 2].id, d.groups[n - 1].id};
}

// ---------------------------------------------------------------------------

Verdict weibull_identity() {
  Rng rng(101);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const Weibull<double> w{uniform(rng, 0.3, 8.0), uniform(rng, 1.0, 1e5)};
    worst = std::max(worst, std::abs(weibull_cdf(w, w.eta) - (1.0 - std::exp(-1.0))));
  }
  return {worst <= 1e-9, fmt("max |F(eta) - (1 - 1/e)| = %.2e over 100 draws", worst)};
}

Verdict weibull_mle_recovery() {
  const Weibull<double> truth{1.7522, 8971.0};
  Rng rng(202);
  std::vector<double> t(1000);
  for (auto& x : t) x = weibull_quantile(truth, uniform01(rng));
  const auto w = fit_weibull_mle<double>(t);
  const double db = std::abs(w.beta - truth.beta) / truth.beta;
  const double de = std::abs(w.eta - truth.eta) / truth.eta;

  // Grid oracle on the raw log-likelihood.
  const auto ll = [&](double b, double e) {
    double s = 0;
    for (double x : t) s += std::log(b / e) + (b - 1) * std::log(x / e) - std::pow(x / e, b);
    return s;
  };
  double best = -std::numeric_limits<double>::infinity(), gb = 0, ge = 0;
  for (double b = 1.5; b <= 2.1; b += 0.002) {
    for (double e = 8400; e <= 9600; e += 2.0) {
      const double v = ll(b, e);
      if (v > best) {
        best = v;
        gb = b;
        ge = e;
      }
    }
  }
  const bool interior = gb > 1.5 && gb < 2.09 && ge > 8400 && ge < 9600;
  const bool grid_ok = interior && std::abs(w.beta - gb) <= 0.002 && std::abs(w.eta - ge) <= 2.0 &&
                       ll(w.beta, w.eta) >= best - 1e-9;
  return {db <= 0.05 && de <= 0.02 && grid_ok,
          fmt("beta %.4f (%.2f%%), ", w.beta, 100 * db) + fmt("eta %.1f (%.2f%%), ", w.eta, 100 * de) +
              fmt("grid optimum beta %.3f eta %.0f", gb, ge)};
}

Verdict gradient_check() {
  double worst = 0;
  for (std::uint64_t c = 0; c < 100; ++c) {
    Rng rng(derive_seed(303, c));
    const auto m = mlp_init<double>({5, 5}, derive_seed(304, c));
    Eigen::MatrixXd x(10, 5);
    Eigen::VectorXd y(10);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = uniform01(rng);
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = uniform01(rng);
    const Eigen::VectorXd g = mlp_gradient(m, x, y);

    Mlp<long double> wide{m.layout, m.hidden_weights.cast<long double>(),
                          m.output_weights.cast<long double>()};
    const Eigen::Matrix<long double, -1, -1> xl = x.cast<long double>();
    const Eigen::Matrix<long double, -1, 1> yl = y.cast<long double>();
    const auto w = pack(wide);
    const long double h = 1e-6L;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      auto wp = w, wm = w;
      wp(i) += h;
      wm(i) -= h;
      unpack(wide, wp);
      const long double ep = mlp_mse(wide, xl, yl) / 2;
      unpack(wide, wm);
      const long double em = mlp_mse(wide, xl, yl) / 2;
      const double fd = static_cast<double>((ep - em) / (2 * h));
      worst = std::max(worst, std::abs(g(i) - fd) / std::max({std::abs(g(i)), std::abs(fd), 1e-8}));
    }
  }
  return {worst < 1e-6, fmt("max relative error %.2e over 100 cases x 36 weights", worst)};
}

Verdict grnn_anchor() {
  double worst = 0;
  bool bias_exact = true;
  for (double spread : {0.01, 0.02, 0.05, 0.1, 1.0, 7.5}) {
    const Eigen::MatrixXd c = Eigen::MatrixXd::Zero(1, 2);
    const auto g = grnn_build(c, Eigen::VectorXd::Ones(1), spread);
    bias_exact = bias_exact && g.bias() == 0.8326 / spread;
    worst = std::max(worst, std::abs(grnn_kernel(spread, g.bias()) - 0.5));
  }
  return {worst <= 1e-4 && bias_exact,
          fmt("max |a(spread) - 0.5| = %.2e, bias exact: ", worst) + (bias_exact ? "yes" : "no")};
}

Verdict grnn_exact_fit() {
  const auto d = renewal_data(1);
  const auto ids = tail_test_ids(d);
  const auto train = exclude_groups(d, ids).flatten();
  ModelSpec spec;
  spec.kind = EstimatorKind::grnn;
  spec.spread = 0.01;
  const auto m = train_model(train, spec);
  const double mse = evaluate(m, train).metrics.mse;
  return {mse < 1e-5, fmt("training MSE %.3e on %.0f rows", mse, static_cast<double>(train.rows.size()))};
}

// Held-out runs at load ranks 4, 7 and 10 so the test runs sit inside the
// training load range.
Verdict grnn_spread_sweep() {
  int hits = 0;
  for (int s = 1; s <= kSeeds; ++s) {
    RenewalSimConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(s);
    auto truth = renewal_truth(cfg);
    std::stable_sort(truth.begin(), truth.end(),
                     [](const auto& a, const auto& b) { return a.load_range_kN < b.load_range_kN; });
    const std::vector<std::string> ids = {truth[3].run_id, truth[6].run_id, truth[9].run_id};
    const auto d = group_features(renewal_features(simulate_renewal(cfg)));
    const auto train = exclude_groups(d, ids), test = select_groups(d, ids);
    std::vector<double> mse;
    for (double spread : {0.01, 0.02, 0.03, 0.04, 0.05}) {
      ModelSpec spec;
      spec.kind = EstimatorKind::grnn;
      spec.spread = spread;
      mse.push_back(static_split_eval(train, test, spec).test.metrics.mse);
    }
    const auto best = std::min_element(mse.begin(), mse.end()) - mse.begin();
    hits += best > 0 && best < 4;
  }
  return {hits >= kNeeded, "interior minimum in " + tally(hits, kSeeds)};
}

Verdict risk_exactness() {
  bool ok = risk_variable(50.0, std::nullopt) == 1.0 && risk_variable(300.0, 300.0) == 0.5 &&
            risk_variable(600.0, 300.0) == 0.125;
  Rng rng(707);
  for (int i = 0; i < 1000; ++i) {
    const double t1 = std::round(uniform(rng, 1, 1000));
    ok = ok && risk_variable(t1, t1) == 0.5 && risk_variable(2 * t1, t1) == 0.125 &&
         risk_variable(uniform(rng, 1, 2000), std::nullopt) == 1.0;
  }
  return {ok, "R = 1, 0.5, 0.125 bit-exact"};
}

Verdict conditioning_guard() {
  const auto a = check_conditioning({5, 5}, 40);
  const auto b = check_conditioning({5, 6}, 40);
  Rng rng(808);
  Eigen::MatrixXd x(40, 5);
  Eigen::VectorXd y(40);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = uniform01(rng);
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = uniform01(rng);
  bool threw = false;
  try {
    train_lm(mlp_init<double>({5, 6}, 1), x, y, LmConfig{});
  } catch (const ConditioningError&) {
    threw = true;
  }
  const bool ok = a.ok && a.parameters == 36 && !b.ok && b.parameters == 43 && threw;
  return {ok, fmt("W = %.0f accepted, W = %.0f rejected at n = 40", static_cast<double>(a.parameters),
                  static_cast<double>(b.parameters))};
}

Verdict cv_invariants() {
  // First pump seed whose eight pumps all contribute rows.
  std::uint64_t seed = 1;
  GroupedFeatures d;
  for (;; ++seed) {
    d = pump_data(seed, 5);
    if (d.groups.size() == 8) break;
  }
  ModelSpec spec;
  spec.kind = EstimatorKind::lmbr;
  spec.n_hidden = 3;
  const auto cv = cross_validate(d, spec);

  std::multiset<std::string> tested;
  bool disjoint = true;
  double sum = 0;
  for (const auto& fold : cv.folds) {
    sum += fold.test.metrics.sse;
    for (const auto& o : fold.test.observations) {
      tested.insert(o.provenance.group_id + "@" + std::to_string(o.provenance.time));
      disjoint = disjoint && o.provenance.group_id == fold.group_id;
    }
  }
  std::multiset<std::string> all;
  for (const auto& g : d.groups) {
    for (const auto& r : g.rows) all.insert(r.provenance.group_id + "@" + std::to_string(r.provenance.time));
  }
  const bool exhaustive = tested == all;

  // Mutation: scrambling one held-out pump's rows must not move its fold's model.
  auto mutated = d;
  const std::string victim = cv.folds.front().group_id;
  for (auto& g : mutated.groups) {
    if (g.id != victim) continue;
    for (auto& r : g.rows) {
      r.target *= 3.0;
      r.inputs *= 1.7;
    }
  }
  const auto fold_model = train_model(exclude_groups(mutated, std::vector<std::string>{victim}).flatten(),
                                      [&] {
                                        auto s = spec;
                                        s.seed = derive_seed(spec.seed, victim);
                                        return s;
                                      }());
  const auto& original = std::get<Mlp<double>>(cv.folds.front().model.estimator);
  const bool no_leak = pack(std::get<Mlp<double>>(fold_model.estimator)) == pack(original);
  const double rel = std::abs(cv.total_sse - sum) / std::max(sum, 1e-300);

  return {cv.folds.size() == 8 && disjoint && exhaustive && no_leak && rel <= 1e-9,
          fmt("8 groups (pump seed %.0f), %.0f folds, ", static_cast<double>(seed),
              static_cast<double>(cv.folds.size())) +
              (disjoint && exhaustive ? "disjoint+exhaustive, " : "partition broken, ") +
              (no_leak ? "no leakage, " : "leakage, ") + fmt("SSE rel diff %.1e", rel)};
}

Verdict speed_ordering() {
  int hits = 0;
  for (int s = 1; s <= kSeeds; ++s) {
    const auto d = renewal_data(static_cast<std::uint64_t>(s));
    const auto train = exclude_groups(d, tail_test_ids(d)).flatten();
    ModelSpec lm;
    lm.kind = EstimatorKind::lm;
    lm.lm.max_epochs = 300;
    lm.lm.mse_target = 1e-3;
    lm.seed = static_cast<std::uint64_t>(s);
    ModelSpec gd = lm;
    gd.kind = EstimatorKind::gd;
    gd.gd = GdConfig{0.75, 0.9, 300, 1e-3};
    const auto a = train_model(train, lm);
    const auto b = train_model(train, gd);
    hits += a.history.final_mse() <= 1e-3 && b.history.final_mse() > 1e-3;
  }
  return {hits >= kNeeded, "LM reaches 1e-3 within 300 epochs and GD does not in " + tally(hits, kSeeds)};
}

// Test runs: the shortest-lived run plus the runs at failure-time ranks 3
// and 8. Both trainers get 1000 epochs.
Verdict regularization_ordering() {
  int hits = 0;
  for (int s = 1; s <= kSeeds; ++s) {
    RenewalSimConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(s);
    const auto runs = simulate_renewal(cfg);
    std::vector<std::pair<double, std::string>> by_life;
    for (const auto& r : runs) by_life.emplace_back(r.failure_time_s, r.run_id);
    std::sort(by_life.begin(), by_life.end());
    const std::vector<std::string> ids = {by_life[0].second, by_life[3].second, by_life[8].second};
    const auto d = group_features(renewal_features(runs));
    const auto train = exclude_groups(d, ids), test = select_groups(d, ids);
    ModelSpec lm;
    lm.kind = EstimatorKind::lm;
    lm.lm.max_epochs = 1000;
    lm.seed = static_cast<std::uint64_t>(s);
    ModelSpec br = lm;
    br.kind = EstimatorKind::lmbr;
    const double lm_max = static_split_eval(train, test, lm).test.metrics.max_abs;
    const double br_max = static_split_eval(train, test, br).test.metrics.max_abs;
    hits += br_max <= lm_max;
  }
  return {hits >= kNeeded, "LMBR test max error <= LM in " + tally(hits, kSeeds)};
}

Verdict baseline_dominance() {
  int hits = 0;
  for (int s = 1; s <= kSeeds; ++s) {
    const auto d = renewal_data(static_cast<std::uint64_t>(s));
    const auto ids = tail_test_ids(d);
    const auto train = exclude_groups(d, ids), test = select_groups(d, ids);
    ModelSpec br;
    br.kind = EstimatorKind::lmbr;
    br.seed = static_cast<std::uint64_t>(s);
    ModelSpec wb;
    wb.kind = EstimatorKind::weibull_baseline;
    const auto eb = first_row_relative_errors(static_split_eval(train, test, br).test);
    const auto ew = first_row_relative_errors(static_split_eval(train, test, wb).test);
    int wins = 0;
    for (std::size_t i = 0; i < eb.size() && i < ew.size(); ++i) wins += eb[i].relative_error < ew[i].relative_error;
    hits += wins >= 2;
  }
  return {hits >= kNeeded, "LMBR beats the baseline on >= 2 of 3 runs in " + tally(hits, kSeeds)};
}

// Hidden layer sized to the inputs, shrunk until the network fits the
// smallest training fold.
Verdict covariate_benefit() {
  int hits = 0;
  for (int s = 1; s <= kSeeds; ++s) {
    const auto d = pump_data(static_cast<std::uint64_t>(s), 5);
    std::size_t largest = 0;
    for (const auto& g : d.groups) largest = std::max(largest, g.rows.size());
    const auto min_fold = static_cast<Eigen::Index>(d.row_count() - largest);
    double sse[3];
    for (int n = 3; n <= 5; ++n) {
      ModelSpec br;
      br.kind = EstimatorKind::lmbr;
      br.seed = static_cast<std::uint64_t>(s);
      br.n_inputs = n;
      br.n_hidden = n;
      while (br.n_hidden > 1 && MlpLayout{n, br.n_hidden}.parameter_count() > min_fold) --br.n_hidden;
      sse[n - 3] = cross_validate(d, br).total_sse;
    }
    hits += std::min(sse[1], sse[2]) <= sse[0];
  }
  return {hits >= kNeeded, "4 or 5 inputs at most the 3-input CV SSE in " + tally(hits, kSeeds)};
}

Verdict simulator_calibration() {
  double first = 0, later = 0;
  std::size_t n_first = 0, n_later = 0;
  std::vector<double> pooled;
  for (std::uint64_t s = 1; s <= 200; ++s) {
    PumpSimConfig pc;
    pc.seed = s;
    for (const auto& h : simulate_pumps(pc)) {
      double last = 0;
      int k = 0;
      for (const auto& e : h.events) {
        if (e.kind == EventKind::measurement) continue;
        (k == 0 ? first : later) += e.day - last;
        ++(k == 0 ? n_first : n_later);
        ++k;
        last = e.day;
      }
    }
    RenewalSimConfig rc;
    rc.seed = s;
    for (const auto& r : simulate_renewal(rc)) pooled.push_back(r.failure_time_s);
  }
  first /= static_cast<double>(n_first);
  later /= static_cast<double>(n_later);
  const auto w = fit_weibull_mle<double>(pooled);
  const bool ok = std::abs(first - 469.0) <= 0.15 * 469.0 && later >= 90.0 && later <= 160.0 &&
                  std::abs(w.beta - 1.7522) <= 0.1 * 1.7522;
  return {ok, fmt("first life %.1f d, later life %.1f d, pooled renewal beta %.4f", first, later, w.beta)};
}

// ---------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::vector<std::string>> pipeline(const fs::path& root) {
  const auto p = [&](const char* rel) { return (root / rel).string(); };
  return {
      {"simulate", "renewal", "--seed", "5", "--out", p("sim_r")},
      {"simulate", "pumps", "--seed", "5", "--out", p("sim_p")},
      {"featurize", "renewal", "--data", p("sim_r/renewal.csv"), "--out", p("feat_r")},
      {"featurize", "pumps", "--data", p("sim_p/pumps.csv"), "--inputs", "5", "--out", p("feat_p")},
      {"fit-weibull", "renewal", "--data", p("sim_r/renewal.csv"), "--out", p("weib")},
      {"train", "--data", p("feat_r/features.csv"), "--model", "lmbr", "--epochs", "50", "--out", p("train")},
      {"predict", "--model-file", p("train/model.txt"), "--data", p("feat_r/features.csv"), "--out", p("pred")},
      {"evaluate", "static", "--data", p("feat_r/features.csv"), "--model", "lm", "--epochs", "50",
       "--test", "run_10,run_11,run_12", "--out", p("eval_s")},
      {"evaluate", "cv", "--data", p("feat_p/features.csv"), "--model", "lmbr", "--hidden", "3",
       "--epochs", "50", "--out", p("eval_cv")},
      {"compare", "cv", "--data", p("feat_p/features.csv"), "--models", "lmbr:hidden=3,grnn,weibull-baseline",
       "--epochs", "50", "--out", p("cmp")},
  };
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) files[fs::relative(entry.path(), root).string()] = slurp(entry.path());
  }
  return files;
}

// The same command lines run twice in the same place, so manifests match too.
Verdict determinism() {
  const auto root = fs::temp_directory_path() / "rlife_acceptance_determinism";
  fs::remove_all(root);
  std::vector<std::map<std::string, std::string>> runs;
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& args : pipeline(root)) {
      std::ostringstream out, err;
      if (dispatch(args, out, err) != 0) return {false, args[0] + " failed: " + err.str()};
    }
    runs.push_back(snapshot(root));
  }
  fs::remove_all(root);
  if (runs[0].size() != runs[1].size()) return {false, "file sets differ"};
  for (const auto& [name, bytes] : runs[0]) {
    const auto it = runs[1].find(name);
    if (it == runs[1].end() || it->second != bytes) return {false, name + " differs"};
  }
  return {!runs[0].empty(), std::to_string(runs[0].size()) + " output files byte-identical on rerun"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"weibull identity", weibull_identity},
      {"weibull MLE recovery", weibull_mle_recovery},
      {"gradient correctness", gradient_check},
      {"GRNN kernel anchor", grnn_anchor},
      {"GRNN exact-fit limit", grnn_exact_fit},
      {"GRNN spread sweep", grnn_spread_sweep},
      {"risk variable exactness", risk_exactness},
      {"conditioning guard", conditioning_guard},
      {"CV protocol invariants", cv_invariants},
      {"speed ordering", speed_ordering},
      {"regularization ordering", regularization_ordering},
      {"baseline dominance", baseline_dominance},
      {"covariate benefit", covariate_benefit},
      {"simulator calibration", simulator_calibration},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s  %2zu %-26s %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
