// Copyright 2026 The rlife Authors
// SPDX-License-Identifier: Apache-2.0

#include "rlife/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "rlife/dataset.hpp"
#include "rlife/error.hpp"
#include "rlife/features.hpp"
#include "rlife/model_io.hpp"
#include "rlife/sim.hpp"
#include "rlife/weibull.hpp"

namespace rlife {

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, v);
  return buf;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open input file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string summary_text(const EvalReport& report) {
  const auto& m = report.metrics;
  std::string out;
  const auto line = [&](const char* key, const std::string& value) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-12s %s\n", key, value.c_str());
    out += buf;
  };
  line("rows", std::to_string(m.count));
  line("mse", fmt("%.10g", m.mse));
  line("mean_abs", fmt("%.10g", m.mean_abs));
  line("max_abs", fmt("%.10g", m.max_abs));
  line("sse", fmt("%.10g", m.sse));
  line("target_min", fmt("%.17g", report.target_scaler.min()(0)));
  line("target_max", fmt("%.17g", report.target_scaler.max()(0)));
  return out;
}

// ---------------------------------------------------------------------------
// Commands

/// State shared by every subcommand: universal flags and the overrides
/// collected from command-specific flags.
struct Invocation {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  KeyValues overrides;
  std::vector<std::string> recorded_args;
};

/// Config file first, then flags.
KeyValues effective_config(const Invocation& inv, RunManifest& manifest) {
  KeyValues kv;
  if (!inv.config_path.empty()) {
    kv = KeyValues::load(inv.config_path);
    manifest.inputs.push_back({inv.config_path, sha256_file(inv.config_path)});
  }
  for (const auto& [k, v] : inv.overrides.entries()) kv.set(k, v);
  if (inv.seed) kv.set("seed", std::to_string(*inv.seed));
  return kv;
}

void add_input(RunManifest& manifest, const std::string& path) {
  manifest.inputs.push_back({path, sha256_file(path)});
}

void commit(const Invocation& inv, RunManifest manifest, const std::vector<OutputFile>& files,
            std::ostream& out) {
  const std::filesystem::path dir(inv.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DomainError("cannot create output directory " + dir.string() + ": " + ec.message());
  manifest.args = inv.recorded_args;
  for (const auto& f : files) {
    std::ofstream o(dir / f.name, std::ios::binary);
    if (!o) throw DomainError("cannot write output file " + (dir / f.name).string());
    o << f.content;
    if (!o) throw DomainError("write failed for " + (dir / f.name).string());
    manifest.outputs.push_back({f.name, sha256_hex(f.content)});
    out << "wrote " << (dir / f.name).string() << '\n';
  }
  std::ofstream m(dir / "manifest.json", std::ios::binary);
  if (!m) throw DomainError("cannot write output file " + (dir / "manifest.json").string());
  m << manifest.to_json();
}

std::string to_text(const KeyValues& kv) {
  std::ostringstream ss;
  kv.write(ss);
  return ss.str();
}

const std::set<std::string, std::less<>> kModelKeys = {
    "model", "label", "inputs", "hidden", "output_transfer", "spread", "lm_epochs",
    "lm_mse_target", "lambda_init", "lambda_factor", "lambda_max", "gd_epochs", "gd_mse_target",
    "learning_rate", "momentum", "seed"};

void run_simulate(const Invocation& inv, const std::string& kind, std::ostream& out) {
  RunManifest manifest;
  manifest.command = "simulate " + kind;
  const KeyValues kv = effective_config(inv, manifest);
  std::ostringstream csv;
  KeyValues effective;
  std::uint64_t seed = 0;
  std::string name;
  if (kind == "renewal") {
    const auto cfg = RenewalSimConfig::from(kv);
    write_renewal_csv(csv, simulate_renewal(cfg));
    effective = cfg.to_key_values();
    seed = cfg.seed;
    name = "renewal.csv";
  } else {
    const auto cfg = PumpSimConfig::from(kv);
    write_pump_csv(csv, simulate_pumps(cfg));
    effective = cfg.to_key_values();
    seed = cfg.seed;
    name = "pumps.csv";
  }
  manifest.config = effective;
  manifest.seeds = {seed};
  commit(inv, std::move(manifest), {{name, csv.str()}, {"config.txt", to_text(effective)}}, out);
}

void run_featurize(const Invocation& inv, const std::string& kind, const std::string& data,
                   std::ostream& out, std::ostream& err) {
  RunManifest manifest;
  manifest.command = "featurize " + kind;
  KeyValues kv = effective_config(inv, manifest);
  add_input(manifest, data);
  kv.require_known({"inputs", "seed"});
  FeatureSet set;
  KeyValues effective;
  effective.set("kind", kind);
  if (kind == "renewal") {
    set = renewal_features(load_renewal_runs(data));
  } else {
    const auto n_inputs = static_cast<int>(kv.get_int("inputs", 5));
    std::vector<std::string> warnings;
    std::vector<PumpHistory> truncated;
    for (const auto& h : load_pump_histories(data)) truncated.push_back(truncate_last_week(h, &warnings));
    PumpFeatureStats stats;
    set = pump_features(truncated, n_inputs, &stats);
    for (const auto& w : warnings) err << "warning: " << w << '\n';
    out << stats.rows << " rows, " << stats.censored_measurements
        << " measurements in censored intervals skipped\n";
    effective.set("inputs", std::to_string(n_inputs));
  }
  if (set.rows.empty()) throw DomainError("featurize: no feature rows produced from " + data);
  std::ostringstream csv;
  write_feature_csv(csv, set);
  manifest.config = effective;
  commit(inv, std::move(manifest), {{"features.csv", csv.str()}}, out);
}

std::vector<double> read_durations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open input file " + path);
  std::vector<double> out;
  std::string line;
  std::size_t n = 0;
  while (csv::read_line(in, line)) {
    ++n;
    if (line.empty() || line[0] == '#') continue;
    out.push_back(csv::parse_number(line, path, n, "duration"));
  }
  return out;
}

/// Lives from one of three sources: a plain duration list, renewal failure
/// times, or pump intervals ending in failure (suspensions are censored and
/// skipped).
void run_fit_weibull(const Invocation& inv, const std::string& kind, const std::string& data,
                     const std::string& failures, std::ostream& out) {
  RunManifest manifest;
  effective_config(inv, manifest).require_known({"seed"});
  if (failures.empty() == data.empty()) throw DomainError("fit-weibull needs exactly one of --failures or --data");
  if (!data.empty() && kind.empty()) throw DomainError("fit-weibull --data needs a dataset kind (renewal or pumps)");
  const std::string& input = failures.empty() ? data : failures;
  manifest.command = failures.empty() ? "fit-weibull " + kind : "fit-weibull";
  add_input(manifest, input);
  std::vector<double> lives;
  if (!failures.empty()) {
    lives = read_durations(failures);
  } else if (kind == "renewal") {
    for (const auto& r : load_renewal_runs(data)) lives.push_back(r.failure_time_s);
  } else {
    for (const auto& h : load_pump_histories(data)) {
      double start = 0.0;
      for (const auto& e : h.events) {
        if (e.kind == EventKind::measurement) continue;
        if (e.kind == EventKind::failure) lives.push_back(e.day - start);
        start = e.day;
      }
    }
  }
  const auto w = fit_weibull_mle<double>(lives);
  std::string text = "beta=" + fmt("%.10g", w.beta) + " eta=" + fmt("%.10g", w.eta) + "\n";
  text += "lives " + std::to_string(lives.size()) + "\n";
  text += "cdf      time\n";
  for (int d = 1; d <= 9; ++d) {
    const double p = d / 10.0;
    text += fmt("%-8.1f", p) + ' ' + fmt("%.6g", weibull_quantile(w, p)) + '\n';
  }
  out << text;
  KeyValues effective;
  if (!kind.empty()) effective.set("kind", kind);
  manifest.config = effective;
  commit(inv, std::move(manifest), {{"weibull.txt", text}}, out);
}

std::string history_csv(const TrainHistory& h) {
  std::string s = h.effective_parameters.empty() ? "epoch,mse\n" : "epoch,mse,gamma\n";
  s += "0," + csv::format_number(h.initial_mse) + (h.effective_parameters.empty() ? "\n" : ",\n");
  for (std::size_t i = 0; i < h.mse.size(); ++i) {
    s += std::to_string(i + 1) + ',' + csv::format_number(h.mse[i]);
    if (!h.effective_parameters.empty()) s += ',' + csv::format_number(h.effective_parameters[i]);
    s += '\n';
  }
  return s;
}

void run_train(const Invocation& inv, const std::string& data, std::ostream& out) {
  RunManifest manifest;
  manifest.command = "train";
  const KeyValues kv = effective_config(inv, manifest);
  kv.require_known(kModelKeys);
  add_input(manifest, data);
  const auto spec = model_spec_from(kv, kv.get_uint("seed", 1));
  const auto model = train_model(load_feature_csv(data), spec);
  std::ostringstream text;
  write_model(text, model);
  manifest.config = to_key_values(spec);
  manifest.seeds = {spec.seed};
  std::vector<OutputFile> files = {{"model.txt", text.str()}};
  if (spec.is_mlp()) {
    files.push_back({"history.csv", history_csv(model.history)});
    out << to_string(model.history.stop) << " after " << model.history.epochs()
        << " epochs, training mse " << fmt("%.6g", model.history.final_mse()) << '\n';
  }
  commit(inv, std::move(manifest), files, out);
}

void run_predict(const Invocation& inv, const std::string& model_path, const std::string& data,
                 std::ostream& out) {
  RunManifest manifest;
  manifest.command = "predict";
  effective_config(inv, manifest).require_known({"seed"});
  add_input(manifest, model_path);
  add_input(manifest, data);
  const auto model = load_model(model_path);
  const auto report = evaluate(model, load_feature_csv(data));
  manifest.config = to_key_values(model.spec);
  out << summary_text(report);
  commit(inv, std::move(manifest), report_files(report), out);
}

std::string first_row_csv(const EvalReport& report) {
  std::string s = "group_id,relative_error\n";
  for (const auto& e : first_row_relative_errors(report)) {
    s += e.group_id + ',' + csv::format_number(e.relative_error) + '\n';
  }
  return s;
}

std::vector<std::string> test_ids(const KeyValues& kv, const GroupedFeatures& data) {
  auto ids = kv.get_strings("test", {});
  if (ids.empty()) throw DomainError("static protocol needs test group ids (--test)");
  select_groups(data, ids);  // rejects unknown ids
  return ids;
}

void run_evaluate(const Invocation& inv, const std::string& protocol, const std::string& data,
                  std::ostream& out) {
  RunManifest manifest;
  manifest.command = "evaluate " + protocol;
  const KeyValues kv = effective_config(inv, manifest);
  auto known = kModelKeys;
  known.insert("test");
  kv.require_known(known);
  add_input(manifest, data);
  const auto spec = model_spec_from(kv, kv.get_uint("seed", 1));
  const auto grouped = group_features(load_feature_csv(data));
  KeyValues effective = to_key_values(spec);
  std::vector<OutputFile> files;

  if (parse_protocol(protocol) == Protocol::static_split) {
    const auto ids = test_ids(kv, grouped);
    effective.set("test", kv.get_string("test", ""));
    const auto r = static_split_eval(exclude_groups(grouped, ids), select_groups(grouped, ids), spec);
    files = report_files(r.test, "test_");
    for (auto& f : report_files(r.train, "train_")) files.push_back(std::move(f));
    files.push_back({"test_first_row_errors.csv", first_row_csv(r.test)});
    std::ostringstream text;
    write_model(text, r.model);
    files.push_back({"model.txt", text.str()});
    out << "test\n" << summary_text(r.test);
    manifest.seeds = {spec.seed};
  } else {
    const auto cv = cross_validate(grouped, spec);
    EvalReport pooled;
    std::string folds = "group_id,seed,rows,sse\n";
    for (const auto& f : cv.folds) {
      pooled.observations.insert(pooled.observations.end(), f.test.observations.begin(),
                                 f.test.observations.end());
      folds += f.group_id + ',' + std::to_string(f.seed) + ',' +
               std::to_string(f.test.observations.size()) + ',' +
               csv::format_number(f.test.metrics.sse) + '\n';
      manifest.seeds.push_back(f.seed);
    }
    const std::string target_name[] = {"target"};
    pooled.target_scaler = fit_scaler(grouped.flatten().target_vector(), target_name);
    pooled.metrics = recompute_metrics(pooled);
    files = report_files(pooled);
    files.push_back({"folds.csv", folds});
    out << "total_sse " << fmt("%.10g", cv.total_sse) << '\n';
  }
  manifest.config = effective;
  commit(inv, std::move(manifest), files, out);
}

/// "kind" or "kind:key=value:key=value", each applied on top of `base`.
std::vector<ModelSpec> parse_model_list(const std::string& list, const KeyValues& base,
                                        std::uint64_t seed) {
  std::vector<ModelSpec> specs;
  for (const auto& item : split(list, ',')) {
    if (item.empty()) continue;
    const auto parts = split(item, ':');
    KeyValues kv = base;
    kv.set("model", parts[0]);
    for (std::size_t i = 1; i < parts.size(); ++i) {
      const auto eq = parts[i].find('=');
      if (eq == std::string::npos) throw DomainError("model entry '" + item + "': expected key=value");
      kv.set(parts[i].substr(0, eq), parts[i].substr(eq + 1));
    }
    kv.require_known(kModelKeys);
    auto spec = model_spec_from(kv, seed);
    if (spec.label.empty() && parts.size() > 1) spec.label = item;
    specs.push_back(std::move(spec));
  }
  return specs;
}

void run_compare(const Invocation& inv, const std::string& protocol, const std::string& data,
                 const std::string& models, std::ostream& out) {
  RunManifest manifest;
  manifest.command = "compare " + protocol;
  KeyValues kv = effective_config(inv, manifest);
  auto known = kModelKeys;
  known.insert("test");
  known.insert("models");
  if (!models.empty()) kv.set("models", models);
  kv.require_known(known);
  add_input(manifest, data);
  const auto list = kv.get_string("models", "lm,lmbr,grnn");
  const auto seed = kv.get_uint("seed", 1);
  KeyValues common;
  for (const auto& [k, v] : kv.entries()) {
    if (k != "models" && k != "test") common.set(k, v);
  }
  const auto specs = parse_model_list(list, common, seed);
  const auto grouped = group_features(load_feature_csv(data));
  ComparisonTable table;
  KeyValues effective;
  effective.set("models", list);
  effective.set("seed", std::to_string(seed));
  if (parse_protocol(protocol) == Protocol::static_split) {
    const auto ids = test_ids(kv, grouped);
    effective.set("test", kv.get_string("test", ""));
    table = compare_models(specs, exclude_groups(grouped, ids), select_groups(grouped, ids));
  } else {
    table = compare_models(specs, grouped);
  }
  for (const auto& s : specs) {
    const auto kv_spec = to_key_values(s);
    for (const auto& [k, v] : kv_spec.entries()) effective.set(s.display_name() + "." + k, v);
  }
  manifest.config = effective;
  manifest.seeds = {seed};
  const auto text = table.render();
  out << text;
  commit(inv, std::move(manifest), {{"comparison.txt", text}}, out);
}

}  // namespace

// ---------------------------------------------------------------------------

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool_version"] = tool_version;
  j["command"] = command;
  j["args"] = args;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config.entries()) cfg[k] = v;
  j["config"] = cfg;
  j["seeds"] = seeds;
  const auto digests = [](const std::vector<FileDigest>& files) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& f : files) a.push_back({{"path", f.path}, {"sha256", f.sha256}});
    return a;
  };
  j["inputs"] = digests(inputs);
  j["outputs"] = digests(outputs);
  return j.dump(2) + "\n";
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw DomainError("sha256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

std::vector<OutputFile> report_files(const EvalReport& report, std::string_view prefix) {
  if (report.observations.empty()) throw DomainError("report has no observations");
  const std::string p(prefix);
  std::string rows = "group_id,time,predicted,actual,error\n";
  for (const auto& o : report.observations) {
    rows += o.provenance.group_id + ',' + csv::format_number(o.provenance.time) + ',' +
            csv::format_number(o.predicted) + ',' + csv::format_number(o.actual) + ',' +
            csv::format_number(o.error) + '\n';
  }

  std::vector<const Observation*> sorted;
  for (const auto& o : report.observations) sorted.push_back(&o);
  std::stable_sort(sorted.begin(), sorted.end(), [](const Observation* a, const Observation* b) {
    if (a->provenance.group_id != b->provenance.group_id) {
      return a->provenance.group_id < b->provenance.group_id;
    }
    return a->provenance.time < b->provenance.time;
  });
  std::string plot = "group_id,time,actual_residual,predicted_residual\n";
  for (const auto* o : sorted) {
    plot += o->provenance.group_id + ',' + csv::format_number(o->provenance.time) + ',' +
            csv::format_number(o->actual) + ',' + csv::format_number(o->predicted) + '\n';
  }
  return {{p + "predictions.csv", rows}, {p + "summary.txt", summary_text(report)}, {p + "plot.csv", plot}};
}

void emit_reports(const EvalReport& report, const std::filesystem::path& out_dir,
                  std::string_view prefix) {
  const auto files = report_files(report, prefix);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw DomainError("cannot create output directory " + out_dir.string() + ": " + ec.message());
  for (const auto& f : files) {
    std::ofstream o(out_dir / f.name, std::ios::binary);
    if (!o || !(o << f.content)) throw DomainError("cannot write output file " + (out_dir / f.name).string());
  }
}

ModelSpec model_spec_from(const KeyValues& kv, std::uint64_t seed) {
  ModelSpec s;
  s.kind = parse_estimator_kind(kv.get_string("model", "lm"));
  s.label = kv.get_string("label", "");
  s.n_inputs = kv.get_int("inputs", 0);
  s.n_hidden = kv.get_int("hidden", s.n_hidden);
  s.output_transfer = parse_transfer(kv.get_string("output_transfer", std::string(to_string(s.output_transfer))));
  s.spread = kv.get_double("spread", s.spread);
  s.lm.max_epochs = static_cast<int>(kv.get_int("lm_epochs", s.lm.max_epochs));
  s.lm.mse_target = kv.get_double("lm_mse_target", s.lm.mse_target);
  s.lm.lambda_init = kv.get_double("lambda_init", s.lm.lambda_init);
  s.lm.lambda_factor = kv.get_double("lambda_factor", s.lm.lambda_factor);
  s.lm.lambda_max = kv.get_double("lambda_max", s.lm.lambda_max);
  s.gd.max_epochs = static_cast<int>(kv.get_int("gd_epochs", s.gd.max_epochs));
  s.gd.mse_target = kv.get_double("gd_mse_target", s.gd.mse_target);
  s.gd.learning_rate = kv.get_double("learning_rate", s.gd.learning_rate);
  s.gd.momentum = kv.get_double("momentum", s.gd.momentum);
  s.seed = seed;
  if (s.n_inputs < 0) throw DomainError("inputs must be non-negative");
  if (!(s.spread > 0)) throw DomainError("spread must be positive");
  s.lm.validate();
  s.gd.validate();
  return s;
}

KeyValues to_key_values(const ModelSpec& s) {
  KeyValues kv;
  const auto num = [&](const char* k, double v) { kv.set(k, csv::format_number(v)); };
  kv.set("model", std::string(to_string(s.kind)));
  if (!s.label.empty()) kv.set("label", s.label);
  kv.set("inputs", std::to_string(s.n_inputs));
  kv.set("seed", std::to_string(s.seed));
  if (s.kind == EstimatorKind::grnn) {
    num("spread", s.spread);
  } else if (s.is_mlp()) {
    kv.set("hidden", std::to_string(s.n_hidden));
    kv.set("output_transfer", std::string(to_string(s.output_transfer)));
    if (s.kind == EstimatorKind::gd) {
      kv.set("gd_epochs", std::to_string(s.gd.max_epochs));
      num("gd_mse_target", s.gd.mse_target);
      num("learning_rate", s.gd.learning_rate);
      num("momentum", s.gd.momentum);
    } else {
      kv.set("lm_epochs", std::to_string(s.lm.max_epochs));
      num("lm_mse_target", s.lm.mse_target);
      num("lambda_init", s.lm.lambda_init);
      num("lambda_factor", s.lm.lambda_factor);
      num("lambda_max", s.lm.lambda_max);
    }
  }
  return kv;
}

int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Residual-life prediction from condition-monitoring data", "rlife"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  Invocation inv;
  std::string mode, data, failures, model_path, models;

  const auto universal = [&](CLI::App* sub) {
    sub->add_option("--config", inv.config_path, "key=value config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", inv.seed, "random seed");
    sub->add_option("--out", inv.out_dir, "output directory")->required();
  };
  const auto override_flag = [&](CLI::App* sub, const std::string& flag, const std::string& key,
                                 const std::string& help) {
    sub->add_option_function<std::string>(
        flag, [&inv, key](const std::string& v) { inv.overrides.set(key, v); }, help);
  };
  const auto model_flags = [&](CLI::App* sub) {
    override_flag(sub, "--model", "model", "gd, lm, lmbr, grnn or weibull-baseline");
    override_flag(sub, "--inputs", "inputs", "leading input columns to use (0 = all)");
    override_flag(sub, "--hidden", "hidden", "hidden nodes");
    override_flag(sub, "--output-transfer", "output_transfer", "log_sigmoid or linear");
    override_flag(sub, "--spread", "spread", "GRNN spread");
    sub->add_option_function<std::string>(
        "--epochs",
        [&inv](const std::string& v) {
          inv.overrides.set("lm_epochs", v);
          inv.overrides.set("gd_epochs", v);
        },
        "epoch limit");
  };
  const auto data_flag = [&](CLI::App* sub, const char* help) {
    sub->add_option("--data", data, help)->required();
  };

  auto* simulate = app.add_subcommand("simulate", "generate a synthetic dataset");
  simulate->add_option("kind", mode, "renewal or pumps")->required()->check(CLI::IsMember({"renewal", "pumps"}));
  universal(simulate);

  auto* featurize = app.add_subcommand("featurize", "turn a dataset into feature rows");
  featurize->add_option("kind", mode, "renewal or pumps")->required()->check(CLI::IsMember({"renewal", "pumps"}));
  data_flag(featurize, "dataset CSV");
  override_flag(featurize, "--inputs", "inputs", "pump inputs: 3, 4 or 5");
  universal(featurize);

  auto* fit = app.add_subcommand("fit-weibull", "fit the Weibull baseline to failure times");
  fit->add_option("kind", mode, "dataset kind for --data: renewal or pumps")
      ->check(CLI::IsMember({"renewal", "pumps"}));
  fit->add_option("--data", data, "renewal or pump dataset CSV");
  fit->add_option("--failures", failures, "one failure time per line");
  universal(fit);

  auto* train = app.add_subcommand("train", "train one model on a feature CSV");
  data_flag(train, "feature CSV");
  model_flags(train);
  universal(train);

  auto* predict = app.add_subcommand("predict", "apply a saved model to a feature CSV");
  predict->add_option("--model-file", model_path, "model written by train")->required();
  data_flag(predict, "feature CSV");
  universal(predict);

  auto* evaluate = app.add_subcommand("evaluate", "static split or leave-one-group-out CV");
  evaluate->add_option("protocol", mode, "static or cv")->required()->check(CLI::IsMember({"static", "cv"}));
  data_flag(evaluate, "feature CSV");
  model_flags(evaluate);
  override_flag(evaluate, "--test", "test", "comma-separated test group ids (static)");
  universal(evaluate);

  auto* compare = app.add_subcommand("compare", "rank several models under one protocol");
  compare->add_option("protocol", mode, "static or cv")->required()->check(CLI::IsMember({"static", "cv"}));
  data_flag(compare, "feature CSV");
  compare->add_option("--models", models, "comma list of kind[:key=value...]");
  model_flags(compare);
  override_flag(compare, "--test", "test", "comma-separated test group ids (static)");
  universal(compare);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--out") {
      ++i;
      continue;
    }
    if (args[i].rfind("--out=", 0) == 0) continue;
    inv.recorded_args.push_back(args[i]);
  }

  try {
    if (simulate->parsed()) {
      run_simulate(inv, mode, out);
    } else if (featurize->parsed()) {
      run_featurize(inv, mode, data, out, err);
    } else if (fit->parsed()) {
      run_fit_weibull(inv, mode, data, failures, out);
    } else if (train->parsed()) {
      run_train(inv, data, out);
    } else if (predict->parsed()) {
      run_predict(inv, model_path, data, out);
    } else if (evaluate->parsed()) {
      run_evaluate(inv, mode, data, out);
    } else {
      run_compare(inv, mode, data, models, out);
    }
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace rlife
