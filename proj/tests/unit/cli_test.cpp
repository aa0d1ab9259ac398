// Copyright 2026 The rlife Authors
// SPDX-License-Identifier: Apache-2.0

#include "rlife/cli.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "fixtures.hpp"

namespace rlife {
namespace {

namespace fs = std::filesystem;
using testing::scratch_dir;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Exit status of the installed binary run through the shell.
int run_binary(const std::string& args) {
  const char* exe = std::getenv("RLIFE_CLI");
  if (!exe) return -1;
  const int status = std::system((std::string(exe) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class CliPipeline : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = scratch_dir(::testing::UnitTest::GetInstance()->current_test_info()->name());
    ASSERT_EQ(run({"simulate", "renewal", "--seed", "3", "--out", (dir_ / "sim").string()}).code, 0);
    ASSERT_EQ(run({"featurize", "renewal", "--data", (dir_ / "sim/renewal.csv").string(), "--out",
                   (dir_ / "feat").string()})
                  .code,
              0);
  }
  fs::path features() const { return dir_ / "feat/features.csv"; }
  fs::path dir_;
};

TEST(Sha256, KnownDigests) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(ModelSpecKeys, RoundTrip) {
  KeyValues kv;
  kv.set("model", "lmbr");
  kv.set("hidden", "4");
  kv.set("epochs", "77");
  kv.set("spread", "0.2");
  kv.set("output_transfer", "linear");
  const auto spec = model_spec_from(kv, 5);
  EXPECT_EQ(spec.kind, EstimatorKind::lmbr);
  EXPECT_EQ(spec.n_hidden, 4);
  EXPECT_EQ(spec.output_transfer, Transfer::linear);
  EXPECT_EQ(spec.seed, 5u);
  const auto again = model_spec_from(to_key_values(spec), 5);
  EXPECT_EQ(to_key_values(again).entries(), to_key_values(spec).entries());
}

TEST_F(CliPipeline, UnknownConfigKeyRejected) {
  std::ofstream(dir_ / "bad.cfg") << "hiden = 4\n";
  const auto r = run({"train", "--data", features().string(), "--config", (dir_ / "bad.cfg").string(),
                      "--out", (dir_ / "t").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("hiden"), std::string::npos);
}

TEST(ReportFiles, EmptyReportRejected) {
  EXPECT_THROW(report_files(EvalReport{}), DomainError);
}

TEST_F(CliPipeline, SimulateWritesManifest) {
  const auto manifest = nlohmann::json::parse(slurp(dir_ / "sim/manifest.json"));
  EXPECT_EQ(manifest["command"], "simulate renewal");
  EXPECT_EQ(manifest["tool_version"], std::string(kToolVersion));
  EXPECT_EQ(manifest["seeds"][0], 3);
  bool found = false;
  for (const auto& o : manifest["outputs"]) {
    if (o["path"] == "renewal.csv") {
      found = true;
      EXPECT_EQ(o["sha256"], sha256_file(dir_ / "sim/renewal.csv"));
    }
  }
  EXPECT_TRUE(found);
  for (const auto& a : manifest["args"]) EXPECT_EQ(a.get<std::string>().find(dir_.string()), std::string::npos);
}

TEST_F(CliPipeline, EvaluateReportsAgreeWithPredictions) {
  const auto out = dir_ / "eval";
  const auto r = run({"evaluate", "static", "--data", features().string(), "--model", "grnn",
                      "--test", "run_02,run_05", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream csv(slurp(out / "test_predictions.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "group_id,time,predicted,actual,error");
  std::size_t n = 0;
  while (std::getline(csv, line)) {
    std::stringstream ss(line);
    std::string id, t, p, a, e;
    std::getline(ss, id, ',');
    std::getline(ss, t, ',');
    std::getline(ss, p, ',');
    std::getline(ss, a, ',');
    std::getline(ss, e, ',');
    EXPECT_TRUE(id == "run_02" || id == "run_05");
    const double err = std::stod(p) - std::stod(a);
    EXPECT_NEAR(err, std::stod(e), 1e-9 * std::max(1.0, std::abs(err)));
    ++n;
  }
  EXPECT_GT(n, 0u);
  EXPECT_NE(slurp(out / "test_summary.txt").find("max_abs"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "train_plot.csv"));
  EXPECT_TRUE(fs::exists(out / "model.txt"));
}

TEST_F(CliPipeline, TrainThenPredict) {
  ASSERT_EQ(run({"train", "--data", features().string(), "--model", "lm", "--epochs", "20", "--out",
                 (dir_ / "train").string()})
                .code,
            0);
  EXPECT_TRUE(fs::exists(dir_ / "train/history.csv"));
  const auto r = run({"predict", "--model-file", (dir_ / "train/model.txt").string(), "--data",
                      features().string(), "--out", (dir_ / "pred").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "pred/predictions.csv"));
}

TEST_F(CliPipeline, SameSeedSameBytes) {
  for (const char* name : {"a", "b"}) {
    ASSERT_EQ(run({"train", "--data", features().string(), "--model", "lmbr", "--epochs", "15",
                   "--seed", "4", "--out", (dir_ / name).string()})
                  .code,
              0);
  }
  for (const char* f : {"model.txt", "history.csv", "manifest.json"}) {
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  }
}

TEST_F(CliPipeline, CompareWritesRankedTable) {
  const auto r = run({"compare", "cv", "--data", features().string(), "--models",
                      "grnn:spread=0.1,weibull-baseline", "--out", (dir_ / "cmp").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto table = slurp(dir_ / "cmp/comparison.txt");
  EXPECT_NE(table.find("grnn"), std::string::npos);
  EXPECT_NE(table.find("weibull-baseline"), std::string::npos);
}

TEST(CliErrors, MissingInputNamesPath) {
  const auto dir = scratch_dir("cli_missing");
  const auto r = run({"featurize", "renewal", "--data", "/nonexistent/runs.csv", "--out", dir.string()});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("/nonexistent/runs.csv"), std::string::npos);
}

TEST(CliErrors, MalformedDataIsDomainError) {
  const auto dir = scratch_dir("cli_malformed");
  std::ofstream(dir / "bad.csv") << "run_id,elapsed_s,load_mean_kN,load_range_kN,temperature_C\n"
                                    "r1,0,abc,300,22\n";
  const auto r = run({"featurize", "renewal", "--data", (dir / "bad.csv").string(), "--out",
                      (dir / "o").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("bad.csv:2"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "o/manifest.json"));
}

TEST(CliErrors, UsageErrors) {
  EXPECT_EQ(run({"simulate", "turbines", "--out", "/tmp/x"}).code, 2);
  EXPECT_EQ(run({"simulate", "renewal"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(CliBinary, ExitCodes) {
  if (!std::getenv("RLIFE_CLI")) GTEST_SKIP() << "RLIFE_CLI not set";
  const auto dir = scratch_dir("cli_binary");
  EXPECT_EQ(run_binary("--version"), 0);
  EXPECT_EQ(run_binary("simulate pumps --seed 2 --out " + (dir / "p").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "p/pumps.csv"));
  EXPECT_EQ(run_binary("simulate pumps --bogus --out " + (dir / "q").string()), 2);
  EXPECT_EQ(run_binary("featurize pumps --data /nonexistent.csv --out " + (dir / "r").string()), 1);
}

}  // namespace
}  // namespace rlife
