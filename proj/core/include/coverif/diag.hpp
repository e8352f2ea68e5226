// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace coverif {

struct SourceLoc {
  std::string file;
  int line = 0;
  int col = 0;

  std::string str() const {
    return file + ":" + std::to_string(line) + ":" + std::to_string(col);
  }
};

/// All user-facing failures (parse errors, elaboration errors, engine
/// errors) are reported through this type. The CLI catches it at the top
/// level and prints `file:line:col: message` on stderr.
class Error : public std::runtime_error {
 public:
  explicit Error(std::string msg) : std::runtime_error(std::move(msg)) {}
  Error(SourceLoc loc, const std::string& msg)
      : std::runtime_error(loc.str() + ": " + msg), loc_(std::move(loc)) {}

  const std::optional<SourceLoc>& where() const { return loc_; }

 private:
  std::optional<SourceLoc> loc_;
};

/// Resource exhaustion inside the SAT core. Kept distinct from Error so
/// engines can tell "unsat" and "gave up" apart; it must never be folded
/// into a Safe verdict.
class SolverLimit : public std::runtime_error {
 public:
  explicit SolverLimit(std::string msg) : std::runtime_error(std::move(msg)) {}
};

}  // namespace coverif
