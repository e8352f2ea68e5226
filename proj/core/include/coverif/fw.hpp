// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "coverif/rtl_ast.hpp"  // reuses the UnOp/BinOp operator enums

namespace coverif::fw {

// C-like firmware/driver subset. Variables carry explicit widths (u1..u64),
// arrays have constant size, and the hardware is driven through the
// intrinsics nondet/assume/assert/step/set_input/read_output.

enum class EKind { Const, Var, Index, Nondet, ReadOutput, Unary, Binary, Ternary };

struct FwExpr;
using FwExprPtr = std::shared_ptr<FwExpr>;

struct FwExpr {
  EKind kind;
  SourceLoc loc;
  uint64_t value = 0;        // Const
  std::string name;          // Var / Index base / ReadOutput signal
  FwExprPtr index;           // Index
  unsigned nondet_width = 0; // Nondet
  rtl::UnOp un_op{};
  rtl::BinOp bin_op{};
  FwExprPtr lhs, rhs, cond;
};

enum class SKind { Decl, Assign, If, For, While, Step, Assume, Assert, SetInput, Property };

struct PropertySpec {
  std::string label;
  FwExprPtr antecedent;       // null means "true"
  FwExprPtr consequent_now;   // checked in the same cycle
  unsigned delay = 0;         // ##N
  FwExprPtr consequent_later; // checked after `delay` steps; null if none
};

struct FwStmt;
using FwStmtPtr = std::shared_ptr<FwStmt>;

struct FwStmt {
  SKind kind;
  SourceLoc loc;
  // Decl
  std::string name;
  unsigned width = 0;
  unsigned array_size = 0;  // 0: scalar
  FwExprPtr init;           // optional initializer
  // Assign
  std::string lhs_name;
  FwExprPtr lhs_index;  // array element target
  FwExprPtr rhs;
  // If / While / For
  FwExprPtr cond;
  std::vector<FwStmtPtr> then_stmts, else_stmts, body;
  std::string loop_var;
  FwExprPtr loop_init, loop_step;
  // Assume / Assert / SetInput
  FwExprPtr expr;
  std::string label;   // assert
  std::string signal;  // set_input target
  // Property
  PropertySpec property;
};

struct FirmwareProgram {
  std::vector<FwStmtPtr> stmts;
};

FirmwareProgram parse_fw(const std::string& text, const std::string& filename = "<fw>");
FirmwareProgram parse_fw_file(const std::string& path);

// Expand a temporal property into the assert/step/assert shape:
//   assert(!antecedent || consequent_now); step(); ... ; assert(consequent_later)
std::vector<FwStmtPtr> lower_property(const PropertySpec& p);

}  // namespace coverif::fw
