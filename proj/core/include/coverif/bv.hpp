// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "coverif/diag.hpp"

namespace coverif::bv {

// Width-annotated bit-vector expressions. Nodes are immutable and shared;
// two structurally equal nodes may or may not share storage, so equality
// is structural (see struct_eq) and every node caches its hash.
//
// Semantics are two's-complement modular arithmetic at the node width.
// Shift amounts >= width yield 0 for both shl and lshr; the SAT encoding
// in bitblast.cpp implements the identical convention.
enum class Op : uint8_t {
  Var,
  Const,
  Not,
  And,
  Or,
  Xor,
  Neg,
  Add,
  Sub,
  Mul,
  Shl,
  Lshr,
  Eq,
  Ult,
  Ule,
  Slt,
  Ite,
  Extract,
  Concat,
  Zext,
  Sext,
  RedOr,
  RedAnd,
  RedXor,
};

const char* op_name(Op op);

class Expr;
using ExprRef = std::shared_ptr<const Expr>;

class Expr {
 public:
  Op op;
  unsigned width;          // result width in bits, 1..64
  std::string name;        // Var
  unsigned version = 0;    // Var
  uint64_t value = 0;      // Const
  unsigned hi = 0, lo = 0; // Extract
  ExprRef a, b, c;         // operands (a only, a/b, or a/b/c for Ite)
  size_t hash = 0;

  bool is_const() const { return op == Op::Const; }
  bool is_const(uint64_t v) const { return op == Op::Const && value == v; }
  bool is_var() const { return op == Op::Var; }
};

uint64_t width_mask(unsigned width);

// ---- constructors (with light constant folding) ----
ExprRef var(std::string name, unsigned version, unsigned width);
ExprRef constant(uint64_t value, unsigned width);
ExprRef bv_true();
ExprRef bv_false();

ExprRef bv_not(ExprRef a);
ExprRef bv_and(ExprRef a, ExprRef b);
ExprRef bv_or(ExprRef a, ExprRef b);
ExprRef bv_xor(ExprRef a, ExprRef b);
ExprRef neg(ExprRef a);
ExprRef add(ExprRef a, ExprRef b);
ExprRef sub(ExprRef a, ExprRef b);
ExprRef mul(ExprRef a, ExprRef b);
ExprRef shl(ExprRef a, ExprRef amount);
ExprRef lshr(ExprRef a, ExprRef amount);
ExprRef eq(ExprRef a, ExprRef b);
ExprRef ne(ExprRef a, ExprRef b);
ExprRef ult(ExprRef a, ExprRef b);
ExprRef ule(ExprRef a, ExprRef b);
ExprRef slt(ExprRef a, ExprRef b);
ExprRef ite(ExprRef cond, ExprRef a, ExprRef b);
ExprRef extract(ExprRef a, unsigned hi, unsigned lo);
ExprRef concat(ExprRef a, ExprRef b);  // a occupies the most significant bits
ExprRef zext(ExprRef a, unsigned width);
ExprRef sext(ExprRef a, unsigned width);
ExprRef redor(ExprRef a);
ExprRef redand(ExprRef a);
ExprRef redxor(ExprRef a);

// Adapt a to exactly `width` bits: zext if narrower, extract if wider.
ExprRef fit(ExprRef a, unsigned width);
// Boolean helpers over width-1 expressions.
ExprRef lnot(ExprRef a);
ExprRef land(ExprRef a, ExprRef b);
ExprRef lor(ExprRef a, ExprRef b);
// Nonzero test: width-1 result, identity on width-1 operands.
ExprRef truthy(ExprRef a);

bool struct_eq(const ExprRef& a, const ExprRef& b);
std::string to_string(const ExprRef& e);

// Rebuild e with every Var leaf replaced by fn(var). Reconstruction goes
// through the public constructors, so constant folding applies to the
// substituted tree.
ExprRef substitute(const ExprRef& e,
                   const std::function<ExprRef(const Expr& var)>& fn);

// Variables of an expression, deduplicated, in first-occurrence order.
void collect_vars(const ExprRef& e, std::vector<const Expr*>& out);

// ---- lowering of Verilog bit operations to mask/shift form ----

// lhs[hi:lo] = rhs as a full-width read-modify-write over old_value.
ExprRef lower_bit_assign(ExprRef old_value, unsigned hi, unsigned lo,
                         ExprRef rhs);
// {slice0, slice1, ...} with slice = operand[hi:lo]; the first entry
// lands in the most significant bits of the result.
struct ConcatSlice {
  ExprRef value;
  unsigned hi;
  unsigned lo;
};
ExprRef lower_concat(const std::vector<ConcatSlice>& slices);
// base[offset +: w]; offset must be a constant after loop unrolling.
ExprRef lower_indexed_part_select(ExprRef base, ExprRef offset, unsigned w);

// ---- concrete evaluation ----

struct VarKey {
  std::string name;
  unsigned version = 0;
  auto operator<=>(const VarKey&) const = default;
};

class Env {
 public:
  void set(const std::string& name, unsigned version, uint64_t value);
  uint64_t get(const std::string& name, unsigned version) const;
  bool has(const std::string& name, unsigned version) const;
  const std::map<VarKey, uint64_t>& values() const { return values_; }

 private:
  std::map<VarKey, uint64_t> values_;
};

uint64_t eval(const ExprRef& e, const Env& env);

// Shared scalar semantics used by eval, the constant folder and the
// reference simulator; ops with a single operand ignore b.
uint64_t apply_op(Op op, uint64_t a, uint64_t b, unsigned operand_width,
                  unsigned result_width);

}  // namespace coverif::bv
