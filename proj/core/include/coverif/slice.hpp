// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "coverif/ir.hpp"

namespace coverif::slice {

struct SliceResult {
  ir::Program program;
  bool warned_no_asserts = false;
  size_t kept = 0;
  size_t original = 0;
};

// Property-driven, purely syntactic backward slice: keep every statement
// whose definition reaches an assertion through data or control
// dependence, every havoc of a relevant variable, and every assume that
// shares a variable with the relevant set (dropping an assume could turn
// an unsafe program safe). Statement order is preserved; slicing is
// idempotent. A program without assertions is returned unchanged with a
// warning flag.
SliceResult slice(const ir::Program& program);

}  // namespace coverif::slice
