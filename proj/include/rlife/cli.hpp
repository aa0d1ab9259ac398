// Copyright 2026 The rlife Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rlife/config.hpp"
#include "rlife/eval.hpp"

namespace rlife {

inline constexpr std::string_view kToolVersion = "rlife 0.1.0";

/// A file produced by a command, held in memory until the command succeeds.
struct OutputFile {
  std::string name;  // relative to the output directory
  std::string content;
};

struct FileDigest {
  std::string path;
  std::string sha256;
};

/// Written as manifest.json next to every command's outputs. Output paths are
/// relative, so two runs into different directories produce the same bytes.
struct RunManifest {
  std::string command;
  std::vector<std::string> args;
  KeyValues config;
  std::vector<std::uint64_t> seeds;
  std::vector<FileDigest> inputs;
  std::string tool_version{kToolVersion};
  std::vector<FileDigest> outputs;

  std::string to_json() const;
};

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// predictions.csv, summary.txt and plot.csv for one report, with `prefix`
/// prepended to each name. Throws on an empty report.
std::vector<OutputFile> report_files(const EvalReport& report, std::string_view prefix = "");
void emit_reports(const EvalReport& report, const std::filesystem::path& out_dir,
                  std::string_view prefix = "");

/// Model settings shared by train, evaluate and compare.
ModelSpec model_spec_from(const KeyValues& kv, std::uint64_t seed);
KeyValues to_key_values(const ModelSpec& spec);

/// Runs one command line (without the program name). Returns 0 on success,
/// 1 on a domain error and 2 on a usage error.
int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace rlife
