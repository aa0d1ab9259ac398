// Copyright 2026 The rlife Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "rlife/eval.hpp"

namespace rlife {

/// Plain-text model files. The first line is `rlife-model <version>`; the
/// `estimator` line tags the family (mlp, grnn, weibull). Every number is
/// written with 17 significant digits so a save/load cycle is bit-exact.
inline constexpr int kModelFormatVersion = 1;

void write_model(std::ostream& out, const TrainedModel& model);
void save_model(const std::filesystem::path& path, const TrainedModel& model);

TrainedModel read_model(std::istream& in, const std::string& source = "<stream>");
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace rlife
