// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace coverif {

// One assigned nondeterministic value: a havoc occurrence with the clock
// cycle it belongs to (cycle of the step() expansion it feeds).
struct TraceHavoc {
  int cycle = 0;
  std::string name;
  unsigned version = 0;
  uint64_t value = 0;
};

struct Trace {
  std::vector<TraceHavoc> havocs;  // execution order
  std::string violated_assert;
  int violation_cycle = -1;
  // full model valuation over SSA names, for diagnosis
  std::vector<std::pair<std::string, uint64_t>> model;

  nlohmann::json to_json() const;
  static Trace from_json(const nlohmann::json& j);
};

struct ExplorationStats {
  // Path attempts resolved during exploration: every infeasible pruning
  // plus every path run to completion ("Total" vs "Feasible" paths).
  uint64_t branch_attempts = 0;
  uint64_t pruned = 0;
  uint64_t completed_paths = 0;
  uint64_t solver_calls = 0;
  uint64_t solver_instances = 0;
  uint64_t stmts_executed = 0;
  uint64_t formula_equalities = 0;  // monolithic engine
  double solve_time_ms = 0.0;
  double total_time_ms = 0.0;

  double pruning_percent() const {
    if (branch_attempts == 0) return 0.0;
    return 100.0 * static_cast<double>(pruned) / static_cast<double>(branch_attempts);
  }
  nlohmann::json to_json() const;
};

struct Verdict {
  bool safe = true;
  bool bounded = false;  // exploration stopped at the attempt budget
  std::optional<Trace> trace;  // present iff unsafe
  ExplorationStats stats;
};

}  // namespace coverif
