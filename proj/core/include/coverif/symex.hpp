// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "coverif/ir.hpp"
#include "coverif/verdict.hpp"

namespace coverif::symex {

enum class Mode {
  PartialIncremental,  // per-path solver instance, segment-wise additions
  FullIncremental,     // one global instance with activation literals
};

struct Config {
  Mode mode = Mode::PartialIncremental;
  bool prune = true;  // eager infeasibility checks at branches and assumes
  // Stop exploring once this many path attempts have been resolved
  // (0 = run to exhaustion). Without pruning the exploration tree grows
  // exponentially, so ablation measurements cap it; a capped run reports
  // bounded=true and its verdict only covers the explored prefix.
  uint64_t max_attempts = 0;
  // When set, every completed path appends its path condition (the ordered
  // conjuncts) here. Diagnostic/test hook.
  std::vector<std::vector<bv::ExprRef>>* path_log = nullptr;
};

// Depth-first path-based symbolic execution with eager infeasibility
// pruning. Paths extend one statement at a time; branches check both
// directions, the then side is explored first. The run stops at the first
// violated assertion and returns its counterexample.
Verdict run(const ir::Program& program, const Config& config);

}  // namespace coverif::symex
