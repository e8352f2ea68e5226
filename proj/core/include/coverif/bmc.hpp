// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "coverif/ir.hpp"
#include "coverif/verdict.hpp"

namespace coverif::bmc {

// Guarded single-static-assignment form of the whole unwound program: one
// ordered list of equalities, branch conditions bound to guard variables,
// ite merges at joins, and assertion obligations under their path guards.
// The formula size is linear in the unwound program size.
struct SsaProgram {
  struct Equality {
    std::string name;
    unsigned version = 0;
    bv::ExprRef rhs;
    bool is_guard = false;  // guard_k = branch condition
  };
  struct Obligation {
    std::string label;
    bv::ExprRef guard_ctx;  // conjunction of enclosing branch guards
    bv::ExprRef cond;
    int cycle = -1;
  };
  struct HavocVar {
    std::string name;
    unsigned version = 0;
    unsigned width = 0;
    int cycle = -1;
  };

  std::vector<Equality> equalities;
  std::vector<bv::ExprRef> assumes;  // guard-context implications
  std::vector<Obligation> obligations;
  std::vector<HavocVar> havocs;
  size_t guard_count = 0;
  size_t merge_count = 0;
};

SsaProgram encode_ssa(const ir::Program& program);

struct CheckOptions {
  std::string dump_dimacs_path;  // write the final CNF here when non-empty
};

// One solver call over the conjunction of all equalities and assumptions
// together with the disjunction of the violated obligations; per-obligation
// selector literals identify the failing assertion.
Verdict check(const SsaProgram& ssa, const CheckOptions& opts = {});

}  // namespace coverif::bmc
