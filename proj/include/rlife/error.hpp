// Copyright 2026 The rlife Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace rlife {

/// A violated precondition or malformed domain input.
///
/// Everything the library rejects on content grounds (bad CSV rows, degenerate
/// samples, ill-conditioned layouts, diverged training) is reported through
/// this type or a subclass. The CLI maps it to exit code 1.
class DomainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public DomainError {
public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : DomainError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

}  // namespace rlife
