// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "coverif/bv.hpp"

namespace coverif::ir {

// Sequential imperative IR shared by the synthesizer, the composer and the
// engines. Statements are immutable and shared between program variants
// (sliced/unsliced); unwinding clones statements so each copy can carry its
// own cycle tag.
//
// Program expressions reference variables at version 0, meaning "current
// value"; the engines introduce SSA versions during execution/encoding.
//
// Loop and StepMark extend the five core kinds: Loop represents the harness
// cycle loop (and not-yet-unrolled counted loops) between composition and
// unwinding; engines and the slicer only accept acyclic programs. StepMark
// has no semantics and delimits clock cycles for trace reporting.
enum class StmtKind { Assign, Havoc, Assume, Assert, If, Loop, StepMark };

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct LoopInfo {
  bool counted = false;   // trip count statically known
  std::string var;        // counted: loop variable
  uint64_t init = 0;      // counted: first value
  uint64_t step_add = 0;  // counted: increment per iteration (two's complement)
  uint64_t trip = 0;      // counted: iteration count
};

struct Stmt {
  StmtKind kind;
  std::string lhs;      // Assign / Havoc target
  unsigned width = 0;   // width of lhs
  bv::ExprRef expr;     // Assign rhs; Assume/Assert/If/Loop condition (width 1)
  std::string label;    // Assert label
  std::vector<StmtPtr> then_stmts;
  std::vector<StmtPtr> else_stmts;
  std::vector<StmtPtr> body;  // Loop
  LoopInfo loop;
  int cycle = -1;  // clock cycle tag; -1 before unwinding
  SourceLoc loc;
};

StmtPtr mk_assign(std::string lhs, unsigned width, bv::ExprRef rhs);
StmtPtr mk_havoc(std::string lhs, unsigned width);
StmtPtr mk_assume(bv::ExprRef cond);
StmtPtr mk_assert(std::string label, bv::ExprRef cond);
StmtPtr mk_if(bv::ExprRef cond, std::vector<StmtPtr> then_stmts,
              std::vector<StmtPtr> else_stmts);
StmtPtr mk_step_mark();

struct Program {
  std::vector<StmtPtr> stmts;
  std::map<std::string, unsigned> var_widths;

  bool acyclic() const;
  size_t stmt_count() const;  // recursive, loops count their bodies once
  // Assert labels in program order (recursing into branches).
  std::vector<std::string> assert_labels() const;
  // Total width of Havoc statements, branches counted on both sides.
  size_t havoc_bits() const;
};

size_t count_stmts(const std::vector<StmtPtr>& stmts);

std::string to_string(const Stmt& s, int indent = 0);
std::string to_string(const Program& p);

nlohmann::json stmt_to_json(const Stmt& s);
StmtPtr stmt_from_json(const nlohmann::json& j);

// ---- flattened form used by the path-based engine ----

enum class InstrKind { Assign, Havoc, Assume, Assert, Branch, Goto, StepMark, End };

struct Instr {
  InstrKind kind;
  std::string lhs;
  unsigned width = 0;
  bv::ExprRef expr;
  std::string label;
  size_t target = 0;  // Branch: first else instruction; Goto: destination
  int cycle = -1;
  const Stmt* origin = nullptr;
};

// Lower an acyclic program to branch/goto form. Branch falls through to the
// then side; `target` starts the else side.
std::vector<Instr> flatten(const Program& p);

}  // namespace coverif::ir
