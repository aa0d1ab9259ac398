// Copyright 2026 The rlife Authors
// SPDX-License-Identifier: Apache-2.0

#include "rlife/mlp.hpp"

namespace rlife {

std::string_view to_string(Transfer t) {
  return t == Transfer::linear ? "linear" : "log_sigmoid";
}

Transfer parse_transfer(std::string_view name) {
  if (name == "log_sigmoid" || name == "sigmoid" || name == "logsig") return Transfer::log_sigmoid;
  if (name == "linear" || name == "purelin") return Transfer::linear;
  throw DomainError("unknown transfer function '" + std::string(name) + "'");
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::target_reached: return "target_reached";
    case StopReason::epoch_limit: return "epoch_limit";
    case StopReason::converged: return "converged";
  }
  return "?";
}

}  // namespace rlife
