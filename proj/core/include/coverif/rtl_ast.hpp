// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "coverif/diag.hpp"

namespace coverif::rtl {

// Source-level AST for the supported synthesizable subset. Widths are
// attached during elaboration (inferred_width); the parser leaves them 0.

enum class Dir { Input, Output, Inout };
enum class NetKind { Wire, Reg };

enum class ExprKind {
  Ident,
  Const,
  BitSelect,        // base[index]
  PartSelect,       // base[msb:lsb], constant bounds
  IndexedPart,      // base[offset +: width]
  Concat,           // {a, b, ...}
  Unary,            // ~ ! - & | ^ (last three are reductions)
  Binary,
  Ternary,
};

enum class UnOp { BitNot, LogNot, Minus, RedAnd, RedOr, RedXor };
enum class BinOp {
  Add, Sub, Mul, Shl, Shr,
  And, Or, Xor,
  LogAnd, LogOr,
  Eq, Ne, Lt, Le, Gt, Ge,
};

struct ExprAst;
using ExprPtr = std::shared_ptr<ExprAst>;

struct ExprAst {
  ExprKind kind;
  SourceLoc loc;
  unsigned inferred_width = 0;  // set by elaboration

  std::string ident;            // Ident, and base name of selects
  uint64_t value = 0;           // Const
  unsigned const_width = 0;     // Const: declared size, 0 if unsized
  bool sized = false;           // Const: had an explicit size (e.g. 3'b101)
  ExprPtr base;                 // selects
  ExprPtr index;                // BitSelect / IndexedPart offset
  ExprPtr msb, lsb;             // PartSelect bounds (constant expressions)
  unsigned part_width = 0;      // IndexedPart width
  std::vector<ExprPtr> operands;  // Concat
  UnOp un_op{};
  BinOp bin_op{};
  ExprPtr lhs, rhs, cond;       // Binary / Ternary / Unary (lhs)
};

struct LValue {
  // Identifier with an optional bit/part/indexed-part select.
  ExprKind kind = ExprKind::Ident;
  SourceLoc loc;
  std::string name;
  ExprPtr index;       // BitSelect / IndexedPart offset
  ExprPtr msb, lsb;    // PartSelect
  unsigned part_width = 0;
};

enum class StmtKind { Block, If, Assign, For };

struct StmtAst;
using StmtPtr = std::shared_ptr<StmtAst>;

struct StmtAst {
  StmtKind kind;
  SourceLoc loc;
  std::vector<StmtPtr> stmts;   // Block
  ExprPtr cond;                 // If / For condition
  StmtPtr then_branch, else_branch;
  LValue lhs;                   // Assign
  ExprPtr rhs;
  bool blocking = true;         // Assign: '=' vs '<='
  std::string loop_var;         // For
  ExprPtr loop_init, loop_step; // For: initial value, per-iteration value
  StmtPtr body;                 // For
};

struct Range {
  // [msb:lsb] as constant expressions; both null for scalar declarations.
  ExprPtr msb, lsb;
  bool scalar() const { return !msb; }
};

struct Port {
  std::string name;
  Dir dir = Dir::Input;
  Range range;
  SourceLoc loc;
  unsigned width = 0;  // set by elaboration
};

struct Net {
  std::string name;
  NetKind kind = NetKind::Wire;
  Range range;
  SourceLoc loc;
  unsigned width = 0;  // set by elaboration
};

struct ContinuousAssign {
  LValue lhs;
  ExprPtr rhs;
  SourceLoc loc;
};

enum class Trigger { Posedge, Comb };

struct AlwaysBlock {
  Trigger trigger = Trigger::Comb;
  std::string clock;  // Posedge signal name
  StmtPtr body;
  SourceLoc loc;
};

struct Instance {
  std::string module_name;
  std::string instance_name;
  // Positional bindings carry empty formal names; resolved at elaboration.
  std::vector<std::pair<std::string, ExprPtr>> bindings;
  SourceLoc loc;
};

struct InitialAssign {
  std::string name;
  ExprPtr value;  // constant expression
  SourceLoc loc;
};

struct ModuleAst {
  std::string name;
  SourceLoc loc;
  std::vector<Port> ports;
  std::vector<Net> nets;
  std::vector<std::pair<std::string, ExprPtr>> parameters;
  std::vector<ContinuousAssign> continuous_assigns;
  std::vector<AlwaysBlock> always_blocks;
  std::vector<Instance> instances;
  std::vector<InitialAssign> initial_assigns;

  const Port* find_port(const std::string& n) const;
  const Net* find_net(const std::string& n) const;
};

// Canonical structural dump, used for structural comparison in tests and
// for debugging. Stable across parses of equivalent sources.
std::string dump(const ModuleAst& m);
std::string dump(const ExprAst& e);

// Pretty-print back to Verilog source; reparsing the output yields a
// structurally identical AST.
std::string print_verilog(const ModuleAst& m);
std::string print_verilog(const std::vector<ModuleAst>& modules);

}  // namespace coverif::rtl
