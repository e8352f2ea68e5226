// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "coverif/bv.hpp"

#include <algorithm>
#include <functional>

namespace coverif::bv {

const char* op_name(Op op) {
  switch (op) {
    case Op::Var: return "var";
    case Op::Const: return "const";
    case Op::Not: return "not";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Xor: return "xor";
    case Op::Neg: return "neg";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Shl: return "shl";
    case Op::Lshr: return "lshr";
    case Op::Eq: return "eq";
    case Op::Ult: return "ult";
    case Op::Ule: return "ule";
    case Op::Slt: return "slt";
    case Op::Ite: return "ite";
    case Op::Extract: return "extract";
    case Op::Concat: return "concat";
    case Op::Zext: return "zext";
    case Op::Sext: return "sext";
    case Op::RedOr: return "redor";
    case Op::RedAnd: return "redand";
    case Op::RedXor: return "redxor";
  }
  return "?";
}

uint64_t width_mask(unsigned width) {
  return width >= 64 ? ~uint64_t{0} : ((uint64_t{1} << width) - 1);
}

namespace {

void check_width(unsigned w) {
  if (w < 1 || w > 64) throw Error("bit-vector width out of range: " + std::to_string(w));
}

size_t mix(size_t h, size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
}

ExprRef make(Op op, unsigned width, ExprRef a = nullptr, ExprRef b = nullptr,
             ExprRef c = nullptr) {
  check_width(width);
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->width = width;
  e->a = std::move(a);
  e->b = std::move(b);
  e->c = std::move(c);
  size_t h = mix(static_cast<size_t>(op), width);
  if (e->a) h = mix(h, e->a->hash);
  if (e->b) h = mix(h, e->b->hash);
  if (e->c) h = mix(h, e->c->hash);
  e->hash = h;
  return e;
}

uint64_t to_signed_bits(uint64_t v, unsigned w) {
  // sign-extend the w-bit value into 64 bits
  if (w >= 64) return v;
  uint64_t sign = (v >> (w - 1)) & 1;
  return sign ? (v | ~width_mask(w)) : v;
}

}  // namespace

uint64_t apply_op(Op op, uint64_t a, uint64_t b, unsigned operand_width,
                  unsigned result_width) {
  const uint64_t rmask = width_mask(result_width);
  switch (op) {
    case Op::Not: return (~a) & rmask;
    case Op::And: return (a & b) & rmask;
    case Op::Or: return (a | b) & rmask;
    case Op::Xor: return (a ^ b) & rmask;
    case Op::Neg: return (~a + 1) & rmask;
    case Op::Add: return (a + b) & rmask;
    case Op::Sub: return (a - b) & rmask;
    case Op::Mul: return (a * b) & rmask;
    case Op::Shl: return b >= result_width ? 0 : (a << b) & rmask;
    case Op::Lshr: return b >= operand_width ? 0 : (a >> b) & rmask;
    case Op::Eq: return a == b ? 1 : 0;
    case Op::Ult: return a < b ? 1 : 0;
    case Op::Ule: return a <= b ? 1 : 0;
    case Op::Slt: {
      int64_t sa = static_cast<int64_t>(to_signed_bits(a, operand_width));
      int64_t sb = static_cast<int64_t>(to_signed_bits(b, operand_width));
      return sa < sb ? 1 : 0;
    }
    case Op::RedOr: return a != 0 ? 1 : 0;
    case Op::RedAnd: return a == width_mask(operand_width) ? 1 : 0;
    case Op::RedXor: return static_cast<uint64_t>(__builtin_parityll(a));
    case Op::Zext: return a & rmask;
    case Op::Sext: return to_signed_bits(a, operand_width) & rmask;
    default: throw Error(std::string("apply_op: not a scalar op: ") + op_name(op));
  }
}

ExprRef var(std::string name, unsigned version, unsigned width) {
  check_width(width);
  auto e = std::make_shared<Expr>();
  e->op = Op::Var;
  e->width = width;
  e->name = std::move(name);
  e->version = version;
  e->hash = mix(mix(std::hash<std::string>{}(e->name), version), width);
  return e;
}

ExprRef constant(uint64_t value, unsigned width) {
  check_width(width);
  if (value > width_mask(width))
    throw Error("constant " + std::to_string(value) + " does not fit in " +
                std::to_string(width) + " bits");
  auto e = std::make_shared<Expr>();
  e->op = Op::Const;
  e->width = width;
  e->value = value;
  e->hash = mix(mix(0x5bd1e995u, value), width);
  return e;
}

ExprRef bv_true() { return constant(1, 1); }
ExprRef bv_false() { return constant(0, 1); }

namespace {

ExprRef unary(Op op, ExprRef a, unsigned result_width) {
  if (a->is_const())
    return constant(apply_op(op, a->value, 0, a->width, result_width),
                    result_width);
  return make(op, result_width, std::move(a));
}

ExprRef binary(Op op, ExprRef a, ExprRef b, unsigned result_width) {
  if (a->width != b->width)
    throw Error(std::string(op_name(op)) + ": operand widths differ (" +
                std::to_string(a->width) + " vs " + std::to_string(b->width) + ")");
  if (a->is_const() && b->is_const())
    return constant(apply_op(op, a->value, b->value, a->width, result_width),
                    result_width);
  return make(op, result_width, std::move(a), std::move(b));
}

}  // namespace

ExprRef bv_not(ExprRef a) {
  unsigned w = a->width;
  return unary(Op::Not, std::move(a), w);
}
ExprRef bv_and(ExprRef a, ExprRef b) {
  unsigned w = a->width;
  if (a->is_const(0) || b->is_const(0)) return constant(0, w);
  if (a->is_const(width_mask(w))) return b;
  if (b->is_const(width_mask(w))) return a;
  return binary(Op::And, std::move(a), std::move(b), w);
}
ExprRef bv_or(ExprRef a, ExprRef b) {
  unsigned w = a->width;
  if (a->is_const(0)) return b;
  if (b->is_const(0)) return a;
  return binary(Op::Or, std::move(a), std::move(b), w);
}
ExprRef bv_xor(ExprRef a, ExprRef b) {
  unsigned w = a->width;
  return binary(Op::Xor, std::move(a), std::move(b), w);
}
ExprRef neg(ExprRef a) {
  unsigned w = a->width;
  return unary(Op::Neg, std::move(a), w);
}
ExprRef add(ExprRef a, ExprRef b) {
  unsigned w = a->width;
  if (a->is_const(0)) return b;
  if (b->is_const(0)) return a;
  return binary(Op::Add, std::move(a), std::move(b), w);
}
ExprRef sub(ExprRef a, ExprRef b) {
  unsigned w = a->width;
  if (b->is_const(0)) return a;
  return binary(Op::Sub, std::move(a), std::move(b), w);
}
ExprRef mul(ExprRef a, ExprRef b) {
  unsigned w = a->width;
  return binary(Op::Mul, std::move(a), std::move(b), w);
}

namespace {
// Shift amounts are self-determined in the source languages, so the two
// operand widths may differ; fold when both sides are constant.
ExprRef shift(Op op, ExprRef a, ExprRef amount) {
  unsigned w = a->width;
  if (a->is_const() && amount->is_const())
    return constant(apply_op(op, a->value, amount->value, w, w), w);
  return make(op, w, std::move(a), std::move(amount));
}
}  // namespace

ExprRef shl(ExprRef a, ExprRef amount) { return shift(Op::Shl, std::move(a), std::move(amount)); }
ExprRef lshr(ExprRef a, ExprRef amount) { return shift(Op::Lshr, std::move(a), std::move(amount)); }

ExprRef eq(ExprRef a, ExprRef b) {
  if (struct_eq(a, b)) return bv_true();
  return binary(Op::Eq, std::move(a), std::move(b), 1);
}
ExprRef ne(ExprRef a, ExprRef b) { return lnot(eq(std::move(a), std::move(b))); }
ExprRef ult(ExprRef a, ExprRef b) { return binary(Op::Ult, std::move(a), std::move(b), 1); }
ExprRef ule(ExprRef a, ExprRef b) { return binary(Op::Ule, std::move(a), std::move(b), 1); }
ExprRef slt(ExprRef a, ExprRef b) { return binary(Op::Slt, std::move(a), std::move(b), 1); }

ExprRef ite(ExprRef cond, ExprRef a, ExprRef b) {
  if (cond->width != 1) throw Error("ite: condition must have width 1");
  if (a->width != b->width) throw Error("ite: arm widths differ");
  if (cond->is_const()) return cond->value ? a : b;
  if (struct_eq(a, b)) return a;
  unsigned w = a->width;
  return make(Op::Ite, w, std::move(cond), std::move(a), std::move(b));
}

ExprRef extract(ExprRef a, unsigned hi, unsigned lo) {
  if (lo > hi || hi >= a->width)
    throw Error("extract [" + std::to_string(hi) + ":" + std::to_string(lo) +
                "] out of range for width " + std::to_string(a->width));
  unsigned w = hi - lo + 1;
  if (w == a->width) return a;
  if (a->is_const()) return constant((a->value >> lo) & width_mask(w), w);
  auto e = make(Op::Extract, w, std::move(a));
  auto* m = const_cast<Expr*>(e.get());
  m->hi = hi;
  m->lo = lo;
  m->hash = mix(mix(m->hash, hi), lo);
  return e;
}

ExprRef concat(ExprRef a, ExprRef b) {
  unsigned w = a->width + b->width;
  check_width(w);
  if (a->is_const() && b->is_const())
    return constant((a->value << b->width) | b->value, w);
  return make(Op::Concat, w, std::move(a), std::move(b));
}

ExprRef zext(ExprRef a, unsigned width) {
  if (width == a->width) return a;
  if (width < a->width) throw Error("zext: target narrower than operand");
  if (a->is_const()) return constant(a->value, width);
  return make(Op::Zext, width, std::move(a));
}

ExprRef sext(ExprRef a, unsigned width) {
  if (width == a->width) return a;
  if (width < a->width) throw Error("sext: target narrower than operand");
  if (a->is_const())
    return constant(apply_op(Op::Sext, a->value, 0, a->width, width), width);
  return make(Op::Sext, width, std::move(a));
}

ExprRef redor(ExprRef a) { return unary(Op::RedOr, std::move(a), 1); }
ExprRef redand(ExprRef a) { return unary(Op::RedAnd, std::move(a), 1); }
ExprRef redxor(ExprRef a) { return unary(Op::RedXor, std::move(a), 1); }

ExprRef fit(ExprRef a, unsigned width) {
  if (a->width == width) return a;
  if (a->width < width) return zext(std::move(a), width);
  return extract(std::move(a), width - 1, 0);
}

ExprRef lnot(ExprRef a) {
  if (a->width != 1) throw Error("lnot: operand must have width 1");
  return bv_not(std::move(a));
}
ExprRef land(ExprRef a, ExprRef b) {
  if (a->is_const()) return a->value ? b : bv_false();
  if (b->is_const()) return b->value ? a : bv_false();
  return bv_and(std::move(a), std::move(b));
}
ExprRef lor(ExprRef a, ExprRef b) {
  if (a->is_const()) return a->value ? bv_true() : b;
  if (b->is_const()) return b->value ? bv_true() : a;
  return bv_or(std::move(a), std::move(b));
}
ExprRef truthy(ExprRef a) {
  if (a->width == 1) return a;
  return redor(std::move(a));
}

bool struct_eq(const ExprRef& a, const ExprRef& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->hash != b->hash || a->op != b->op || a->width != b->width) return false;
  switch (a->op) {
    case Op::Var: return a->name == b->name && a->version == b->version;
    case Op::Const: return a->value == b->value;
    case Op::Extract:
      if (a->hi != b->hi || a->lo != b->lo) return false;
      break;
    default: break;
  }
  return struct_eq(a->a, b->a) && struct_eq(a->b, b->b) && struct_eq(a->c, b->c);
}

std::string to_string(const ExprRef& e) {
  if (!e) return "<null>";
  switch (e->op) {
    case Op::Var:
      return e->name + "_" + std::to_string(e->version);
    case Op::Const:
      return std::to_string(e->value) + "u" + std::to_string(e->width);
    case Op::Extract:
      return to_string(e->a) + "[" + std::to_string(e->hi) + ":" +
             std::to_string(e->lo) + "]";
    case Op::Ite:
      return "ite(" + to_string(e->a) + ", " + to_string(e->b) + ", " +
             to_string(e->c) + ")";
    default: {
      std::string s = std::string(op_name(e->op)) + "(";
      s += to_string(e->a);
      if (e->b) s += ", " + to_string(e->b);
      if (e->c) s += ", " + to_string(e->c);
      return s + ")";
    }
  }
}

ExprRef substitute(const ExprRef& e,
                   const std::function<ExprRef(const Expr& var)>& fn) {
  switch (e->op) {
    case Op::Var: {
      ExprRef r = fn(*e);
      if (r->width != e->width)
        throw Error("substitution changed width of " + e->name);
      return r;
    }
    case Op::Const:
      return e;
    case Op::Extract:
      return extract(substitute(e->a, fn), e->hi, e->lo);
    case Op::Zext:
      return zext(substitute(e->a, fn), e->width);
    case Op::Sext:
      return sext(substitute(e->a, fn), e->width);
    case Op::Ite:
      return ite(substitute(e->a, fn), substitute(e->b, fn), substitute(e->c, fn));
    case Op::Not:
      return bv_not(substitute(e->a, fn));
    case Op::Neg:
      return neg(substitute(e->a, fn));
    case Op::RedOr:
      return redor(substitute(e->a, fn));
    case Op::RedAnd:
      return redand(substitute(e->a, fn));
    case Op::RedXor:
      return redxor(substitute(e->a, fn));
    case Op::And:
      return bv_and(substitute(e->a, fn), substitute(e->b, fn));
    case Op::Or:
      return bv_or(substitute(e->a, fn), substitute(e->b, fn));
    case Op::Xor:
      return bv_xor(substitute(e->a, fn), substitute(e->b, fn));
    case Op::Add:
      return add(substitute(e->a, fn), substitute(e->b, fn));
    case Op::Sub:
      return sub(substitute(e->a, fn), substitute(e->b, fn));
    case Op::Mul:
      return mul(substitute(e->a, fn), substitute(e->b, fn));
    case Op::Shl:
      return shl(substitute(e->a, fn), substitute(e->b, fn));
    case Op::Lshr:
      return lshr(substitute(e->a, fn), substitute(e->b, fn));
    case Op::Eq:
      return eq(substitute(e->a, fn), substitute(e->b, fn));
    case Op::Ult:
      return ult(substitute(e->a, fn), substitute(e->b, fn));
    case Op::Ule:
      return ule(substitute(e->a, fn), substitute(e->b, fn));
    case Op::Slt:
      return slt(substitute(e->a, fn), substitute(e->b, fn));
    case Op::Concat:
      return concat(substitute(e->a, fn), substitute(e->b, fn));
  }
  throw Error("unreachable op in substitute");
}

namespace {
void collect_vars_rec(const Expr* e, std::vector<const Expr*>& out) {
  if (!e) return;
  if (e->op == Op::Var) {
    for (const Expr* v : out)
      if (v->name == e->name && v->version == e->version) return;
    out.push_back(e);
    return;
  }
  collect_vars_rec(e->a.get(), out);
  collect_vars_rec(e->b.get(), out);
  collect_vars_rec(e->c.get(), out);
}
}  // namespace

void collect_vars(const ExprRef& e, std::vector<const Expr*>& out) {
  collect_vars_rec(e.get(), out);
}

// ---- lowerings ----

ExprRef lower_bit_assign(ExprRef old_value, unsigned hi, unsigned lo,
                         ExprRef rhs) {
  unsigned w = old_value->width;
  if (lo > hi || hi >= w)
    throw Error("bit assignment [" + std::to_string(hi) + ":" +
                std::to_string(lo) + "] out of range for width " + std::to_string(w));
  unsigned fw = hi - lo + 1;
  if (fw == w) return fit(std::move(rhs), w);
  uint64_t field = width_mask(fw);
  uint64_t keep = width_mask(w) & ~(field << lo);
  ExprRef value = fit(std::move(rhs), w);
  ExprRef kept = bv_and(std::move(old_value), constant(keep, w));
  ExprRef placed = shl(bv_and(std::move(value), constant(field, w)),
                       constant(lo, w));
  return bv_or(std::move(kept), std::move(placed));
}

ExprRef lower_concat(const std::vector<ConcatSlice>& slices) {
  if (slices.empty()) throw Error("concat of zero operands");
  unsigned total = 0;
  for (const auto& s : slices) {
    if (s.lo > s.hi || s.hi >= s.value->width)
      throw Error("concat slice out of range");
    total += s.hi - s.lo + 1;
  }
  check_width(total);
  // Shift-and-or form; the leftmost slice ends up in the most significant
  // bits. Shifting happens at the wider of source and result width so a
  // high slice of a wide operand survives the truncation.
  ExprRef acc;
  unsigned pos = total;
  for (const auto& s : slices) {
    unsigned sw = s.hi - s.lo + 1;
    pos -= sw;
    unsigned work = std::max(total, s.value->width);
    ExprRef piece = zext(s.value, work);
    if (s.lo != 0) piece = lshr(std::move(piece), constant(s.lo, work));
    piece = bv_and(std::move(piece), constant(width_mask(sw), work));
    piece = fit(std::move(piece), total);
    if (pos != 0) piece = shl(std::move(piece), constant(pos, total));
    acc = acc ? bv_or(std::move(acc), std::move(piece)) : std::move(piece);
  }
  return acc;
}

ExprRef lower_indexed_part_select(ExprRef base, ExprRef offset, unsigned w) {
  if (!offset->is_const())
    throw Error("indexed part-select offset is not a constant after unrolling");
  uint64_t lo = offset->value;
  if (lo + w > base->width || w == 0)
    throw Error("indexed part-select [" + std::to_string(lo) + " +: " +
                std::to_string(w) + "] out of range for width " +
                std::to_string(base->width));
  return extract(std::move(base), static_cast<unsigned>(lo) + w - 1,
                 static_cast<unsigned>(lo));
}

// ---- evaluation ----

void Env::set(const std::string& name, unsigned version, uint64_t value) {
  values_[VarKey{name, version}] = value;
}
uint64_t Env::get(const std::string& name, unsigned version) const {
  auto it = values_.find(VarKey{name, version});
  if (it == values_.end())
    throw Error("unbound variable " + name + "_" + std::to_string(version));
  return it->second;
}
bool Env::has(const std::string& name, unsigned version) const {
  return values_.contains(VarKey{name, version});
}

uint64_t eval(const ExprRef& e, const Env& env) {
  switch (e->op) {
    case Op::Var: return env.get(e->name, e->version) & width_mask(e->width);
    case Op::Const: return e->value;
    case Op::Ite:
      return eval(e->a, env) ? eval(e->b, env) : eval(e->c, env);
    case Op::Extract:
      return (eval(e->a, env) >> e->lo) & width_mask(e->width);
    case Op::Concat:
      return (eval(e->a, env) << e->b->width) | eval(e->b, env);
    default: {
      uint64_t a = eval(e->a, env);
      uint64_t b = e->b ? eval(e->b, env) : 0;
      return apply_op(e->op, a, b, e->a->width, e->width);
    }
  }
}

}  // namespace coverif::bv
