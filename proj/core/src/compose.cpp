// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "coverif/compose.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace coverif::harness {

using fw::EKind;
using fw::FwExpr;
using fw::FwExprPtr;
using fw::FwStmt;
using fw::FwStmtPtr;
using fw::SKind;

namespace {

unsigned bits_needed(uint64_t v) {
  unsigned n = 1;
  while (n < 64 && (v >> n)) ++n;
  return n;
}

class Composer {
 public:
  Composer(const fw::FirmwareProgram& firmware, const synth::SwNetlistProgram& hw)
      : fw_(firmware), hw_(hw) {}

  ComposedModel run() {
    ComposedModel m;
    m.hw = hw_;
    prog_.var_widths = hw_.var_widths;

    scan_pinned(fw_.stmts);
    for (const auto& [name, w] : hw_.inputs)
      if (!pinned_.contains(name)) havoc_inputs_.emplace_back(name, w);

    // hardware initialization precedes the firmware
    for (const auto& s : hw_.init) prog_.stmts.push_back(s);
    lower_stmts(fw_.stmts, prog_.stmts);

    if (!hw_.clock.empty() && !saw_step_)
      warnings_.push_back("firmware never calls step(): the clock does not advance");

    m.program = std::move(prog_);
    m.pinned_inputs.assign(pinned_.begin(), pinned_.end());
    m.havoc_inputs = havoc_inputs_;
    m.warnings = std::move(warnings_);
    return m;
  }

 private:
  const fw::FirmwareProgram& fw_;
  const synth::SwNetlistProgram& hw_;
  ir::Program prog_;
  std::map<std::string, std::pair<unsigned, unsigned>> vars_;  // width, array size
  std::set<std::string> pinned_;
  std::vector<std::pair<std::string, unsigned>> havoc_inputs_;
  std::vector<std::string> warnings_;
  std::map<std::string, int> label_uses_;
  int temp_counter_ = 0;
  bool saw_step_ = false;

  std::string elem_name(const std::string& base, uint64_t i) {
    return base + "[" + std::to_string(i) + "]";
  }

  std::string resolve_hw(const std::string& name, const SourceLoc& at,
                         bool must_be_input) const {
    std::string full = name;
    if (!hw_.var_widths.contains(full)) full = hw_.top + "." + name;
    if (!hw_.var_widths.contains(full))
      throw Error(at, "unknown hardware signal '" + name + "'");
    if (must_be_input) {
      bool ok = std::any_of(hw_.inputs.begin(), hw_.inputs.end(),
                            [&](const auto& i) { return i.first == full; });
      if (!ok)
        throw Error(at, "set_input target '" + name + "' is not a primary input");
    }
    return full;
  }

  void scan_pinned(const std::vector<FwStmtPtr>& stmts) {
    for (const auto& s : stmts) {
      switch (s->kind) {
        case SKind::SetInput:
          pinned_.insert(resolve_hw(s->signal, s->loc, true));
          break;
        case SKind::If:
          scan_pinned(s->then_stmts);
          scan_pinned(s->else_stmts);
          break;
        case SKind::For:
        case SKind::While:
          scan_pinned(s->body);
          break;
        default:
          break;
      }
    }
  }

  unsigned var_width(const std::string& name, const SourceLoc& at) const {
    auto it = vars_.find(name);
    if (it == vars_.end()) throw Error(at, "undeclared variable '" + name + "'");
    return it->second.first;
  }

  std::string fresh_temp(const std::string& tag, unsigned width) {
    std::string name = tag + "$" + std::to_string(++temp_counter_);
    prog_.var_widths[name] = width;
    return name;
  }

  // ---- expression lowering; nondet() hoists a havoc into `out` ----

  bv::ExprRef lower_expr(const FwExprPtr& e, std::vector<ir::StmtPtr>& out) {
    switch (e->kind) {
      case EKind::Const:
        return bv::constant(e->value, bits_needed(e->value));
      case EKind::Var: {
        auto it = vars_.find(e->name);
        if (it == vars_.end())
          throw Error(e->loc, "undeclared variable '" + e->name + "'");
        if (it->second.second != 0)
          throw Error(e->loc, "array '" + e->name + "' used without an index");
        return bv::var(e->name, 0, it->second.first);
      }
      case EKind::Index: {
        auto it = vars_.find(e->name);
        if (it == vars_.end())
          throw Error(e->loc, "undeclared variable '" + e->name + "'");
        auto [w, n] = it->second;
        if (n == 0) throw Error(e->loc, "'" + e->name + "' is not an array");
        bv::ExprRef idx = lower_expr(e->index, out);
        if (idx->is_const()) {
          if (idx->value >= n) throw Error(e->loc, "array index out of bounds");
          return bv::var(elem_name(e->name, idx->value), 0, w);
        }
        // chain of selects over the elements
        if (!idx->is_var()) {
          std::string t = fresh_temp("idx", idx->width);
          out.push_back(ir::mk_assign(t, idx->width, idx));
          idx = bv::var(t, 0, idx->width);
        }
        bv::ExprRef acc = bv::var(elem_name(e->name, n - 1), 0, w);
        for (int i = static_cast<int>(n) - 2; i >= 0; --i) {
          bv::ExprRef hit = bv::eq(idx, bv::constant(static_cast<uint64_t>(i), idx->width));
          acc = bv::ite(hit, bv::var(elem_name(e->name, i), 0, w), acc);
        }
        return acc;
      }
      case EKind::Nondet: {
        std::string t = fresh_temp("nondet", e->nondet_width);
        out.push_back(ir::mk_havoc(t, e->nondet_width));
        return bv::var(t, 0, e->nondet_width);
      }
      case EKind::ReadOutput: {
        std::string full = resolve_hw(e->name, e->loc, false);
        return bv::var(full, 0, hw_.var_widths.at(full));
      }
      case EKind::Unary: {
        bv::ExprRef a = lower_expr(e->lhs, out);
        switch (e->un_op) {
          case rtl::UnOp::BitNot: return bv::bv_not(a);
          case rtl::UnOp::LogNot: return bv::lnot(bv::truthy(a));
          case rtl::UnOp::Minus: return bv::neg(a);
          default: throw Error(e->loc, "operator not available in firmware");
        }
      }
      case EKind::Binary: {
        bv::ExprRef l = lower_expr(e->lhs, out);
        bv::ExprRef r = lower_expr(e->rhs, out);
        unsigned w = std::max(l->width, r->width);
        using rtl::BinOp;
        switch (e->bin_op) {
          case BinOp::Add: return bv::add(bv::zext(l, w), bv::zext(r, w));
          case BinOp::Sub: return bv::sub(bv::zext(l, w), bv::zext(r, w));
          case BinOp::Mul: return bv::mul(bv::zext(l, w), bv::zext(r, w));
          case BinOp::And: return bv::bv_and(bv::zext(l, w), bv::zext(r, w));
          case BinOp::Or: return bv::bv_or(bv::zext(l, w), bv::zext(r, w));
          case BinOp::Xor: return bv::bv_xor(bv::zext(l, w), bv::zext(r, w));
          case BinOp::Shl: return bv::shl(l, r);
          case BinOp::Shr: return bv::lshr(l, r);
          case BinOp::LogAnd: return bv::land(bv::truthy(l), bv::truthy(r));
          case BinOp::LogOr: return bv::lor(bv::truthy(l), bv::truthy(r));
          case BinOp::Eq: return bv::eq(bv::zext(l, w), bv::zext(r, w));
          case BinOp::Ne: return bv::ne(bv::zext(l, w), bv::zext(r, w));
          case BinOp::Lt: return bv::ult(bv::zext(l, w), bv::zext(r, w));
          case BinOp::Le: return bv::ule(bv::zext(l, w), bv::zext(r, w));
          case BinOp::Gt: return bv::ult(bv::zext(r, w), bv::zext(l, w));
          case BinOp::Ge: return bv::ule(bv::zext(r, w), bv::zext(l, w));
        }
        break;
      }
      case EKind::Ternary: {
        bv::ExprRef c = bv::truthy(lower_expr(e->cond, out));
        bv::ExprRef t = lower_expr(e->lhs, out);
        bv::ExprRef f = lower_expr(e->rhs, out);
        unsigned w = std::max(t->width, f->width);
        return bv::ite(c, bv::fit(t, w), bv::fit(f, w));
      }
    }
    throw Error(e->loc, "cannot lower firmware expression");
  }

  // ---- counted-loop analysis ----

  static bool const_eval(const FwExprPtr& e, uint64_t& out) {
    uint64_t a, b2;
    switch (e->kind) {
      case EKind::Const: out = e->value; return true;
      case EKind::Unary:
        if (!const_eval(e->lhs, a)) return false;
        switch (e->un_op) {
          case rtl::UnOp::BitNot: out = ~a; return true;
          case rtl::UnOp::LogNot: out = a == 0; return true;
          case rtl::UnOp::Minus: out = ~a + 1; return true;
          default: return false;
        }
      case EKind::Binary:
        if (!const_eval(e->lhs, a) || !const_eval(e->rhs, b2)) return false;
        switch (e->bin_op) {
          case rtl::BinOp::Add: out = a + b2; return true;
          case rtl::BinOp::Sub: out = a - b2; return true;
          case rtl::BinOp::Mul: out = a * b2; return true;
          default: return false;
        }
      default: return false;
    }
  }

  // cond over the loop variable only
  static bool cond_on_var(const FwExprPtr& e, const std::string& var) {
    switch (e->kind) {
      case EKind::Const: return true;
      case EKind::Var: return e->name == var;
      case EKind::Unary: return cond_on_var(e->lhs, var);
      case EKind::Binary: return cond_on_var(e->lhs, var) && cond_on_var(e->rhs, var);
      case EKind::Ternary:
        return cond_on_var(e->cond, var) && cond_on_var(e->lhs, var) &&
               cond_on_var(e->rhs, var);
      default: return false;
    }
  }

  static uint64_t eval_on_var(const FwExprPtr& e, const std::string& var, uint64_t v,
                              unsigned width) {
    uint64_t m = bv::width_mask(width);
    switch (e->kind) {
      case EKind::Const: return e->value;
      case EKind::Var: return v & m;
      case EKind::Unary: {
        uint64_t a = eval_on_var(e->lhs, var, v, width);
        switch (e->un_op) {
          case rtl::UnOp::BitNot: return ~a;
          case rtl::UnOp::LogNot: return a == 0;
          case rtl::UnOp::Minus: return ~a + 1;
          default: return 0;
        }
      }
      case EKind::Binary: {
        uint64_t a = eval_on_var(e->lhs, var, v, width);
        uint64_t b2 = eval_on_var(e->rhs, var, v, width);
        switch (e->bin_op) {
          case rtl::BinOp::Add: return a + b2;
          case rtl::BinOp::Sub: return a - b2;
          case rtl::BinOp::Mul: return a * b2;
          case rtl::BinOp::And: return a & b2;
          case rtl::BinOp::Or: return a | b2;
          case rtl::BinOp::Xor: return a ^ b2;
          case rtl::BinOp::Shl: return b2 >= 64 ? 0 : a << b2;
          case rtl::BinOp::Shr: return b2 >= 64 ? 0 : a >> b2;
          case rtl::BinOp::LogAnd: return a && b2;
          case rtl::BinOp::LogOr: return a || b2;
          case rtl::BinOp::Eq: return a == b2;
          case rtl::BinOp::Ne: return a != b2;
          case rtl::BinOp::Lt: return a < b2;
          case rtl::BinOp::Le: return a <= b2;
          case rtl::BinOp::Gt: return a > b2;
          case rtl::BinOp::Ge: return a >= b2;
          default: return 0;
        }
      }
      case EKind::Ternary:
        return eval_on_var(e->cond, var, v, width)
                   ? eval_on_var(e->lhs, var, v, width)
                   : eval_on_var(e->rhs, var, v, width);
      default:
        return 0;
    }
  }

  static bool writes_var(const std::vector<FwStmtPtr>& stmts, const std::string& var) {
    for (const auto& s : stmts) {
      switch (s->kind) {
        case SKind::Assign:
          if (s->lhs_name == var) return true;
          break;
        case SKind::If:
          if (writes_var(s->then_stmts, var) || writes_var(s->else_stmts, var)) return true;
          break;
        case SKind::For:
        case SKind::While:
          if (s->kind == SKind::For && s->loop_var == var) return true;
          if (writes_var(s->body, var)) return true;
          break;
        default:
          break;
      }
    }
    return false;
  }

  // ---- statement lowering ----

  void lower_stmts(const std::vector<FwStmtPtr>& stmts, std::vector<ir::StmtPtr>& out) {
    for (const auto& s : stmts) lower_stmt(s, out);
  }

  void lower_stmt(const FwStmtPtr& s, std::vector<ir::StmtPtr>& out) {
    switch (s->kind) {
      case SKind::Decl: {
        if (vars_.contains(s->name) || prog_.var_widths.contains(s->name))
          throw Error(s->loc, "redefinition of '" + s->name + "'");
        vars_[s->name] = {s->width, s->array_size};
        if (s->array_size == 0) {
          prog_.var_widths[s->name] = s->width;
          bv::ExprRef v = s->init ? lower_expr(s->init, out) : bv::constant(0, s->width);
          out.push_back(ir::mk_assign(s->name, s->width, v));
        } else {
          for (unsigned i = 0; i < s->array_size; ++i) {
            std::string en = elem_name(s->name, i);
            prog_.var_widths[en] = s->width;
            out.push_back(ir::mk_assign(en, s->width, bv::constant(0, s->width)));
          }
        }
        break;
      }
      case SKind::Assign: {
        auto it = vars_.find(s->lhs_name);
        if (it == vars_.end())
          throw Error(s->loc, "undeclared variable '" + s->lhs_name + "'");
        auto [w, n] = it->second;
        if (s->lhs_index) {
          if (n == 0) throw Error(s->loc, "'" + s->lhs_name + "' is not an array");
          bv::ExprRef idx = lower_expr(s->lhs_index, out);
          bv::ExprRef val = lower_expr(s->rhs, out);
          if (idx->is_const()) {
            if (idx->value >= n) throw Error(s->loc, "array index out of bounds");
            out.push_back(ir::mk_assign(elem_name(s->lhs_name, idx->value), w, val));
            break;
          }
          if (!idx->is_var()) {
            std::string t = fresh_temp("idx", idx->width);
            out.push_back(ir::mk_assign(t, idx->width, idx));
            idx = bv::var(t, 0, idx->width);
          }
          if (!val->is_var() && !val->is_const()) {
            std::string t = fresh_temp("val", val->width);
            out.push_back(ir::mk_assign(t, val->width, val));
            val = bv::var(t, 0, val->width);
          }
          for (unsigned i = 0; i < n; ++i) {
            std::string en = elem_name(s->lhs_name, i);
            bv::ExprRef hit = bv::eq(idx, bv::constant(i, idx->width));
            out.push_back(ir::mk_assign(en, w,
                                        bv::ite(hit, bv::fit(val, w), bv::var(en, 0, w))));
          }
          break;
        }
        if (n != 0) throw Error(s->loc, "cannot assign a whole array");
        // x = nondet(w) becomes a plain havoc of x
        if (s->rhs->kind == EKind::Nondet && s->rhs->nondet_width == w) {
          out.push_back(ir::mk_havoc(s->lhs_name, w));
          break;
        }
        out.push_back(ir::mk_assign(s->lhs_name, w, lower_expr(s->rhs, out)));
        break;
      }
      case SKind::If: {
        bv::ExprRef cond = bv::truthy(lower_expr(s->cond, out));
        std::vector<ir::StmtPtr> then_out, else_out;
        lower_stmts(s->then_stmts, then_out);
        lower_stmts(s->else_stmts, else_out);
        out.push_back(ir::mk_if(cond, std::move(then_out), std::move(else_out)));
        break;
      }
      case SKind::While: {
        auto loop = std::make_shared<ir::Stmt>();
        loop->kind = ir::StmtKind::Loop;
        std::vector<ir::StmtPtr> guard_side;
        loop->expr = bv::truthy(lower_expr(s->cond, guard_side));
        if (!guard_side.empty())
          throw Error(s->loc, "nondet() is not allowed in a loop condition");
        lower_stmts(s->body, loop->body);
        out.push_back(loop);
        break;
      }
      case SKind::For: {
        unsigned w = var_width(s->loop_var, s->loc);
        auto loop = std::make_shared<ir::Stmt>();
        loop->kind = ir::StmtKind::Loop;
        std::vector<ir::StmtPtr> guard_side;
        loop->expr = bv::truthy(lower_expr(s->cond, guard_side));
        if (!guard_side.empty())
          throw Error(s->loc, "nondet() is not allowed in a loop condition");

        uint64_t init_v;
        bool counted = const_eval(s->loop_init, init_v) && cond_on_var(s->cond, s->loop_var) &&
                       cond_on_var(s->loop_step, s->loop_var) &&
                       !writes_var(s->body, s->loop_var);
        if (counted) {
          loop->loop.counted = true;
          loop->loop.var = s->loop_var;
          loop->loop.init = init_v & bv::width_mask(w);
          // trip count by stepping the counter
          uint64_t v = loop->loop.init;
          uint64_t trip = 0;
          while (eval_on_var(s->cond, s->loop_var, v, w) & 1) {
            if (++trip > 100000) break;  // capped; unwind bounds it anyway
            v = eval_on_var(s->loop_step, s->loop_var, v, w) & bv::width_mask(w);
          }
          loop->loop.trip = trip;
          uint64_t after = eval_on_var(s->loop_step, s->loop_var, loop->loop.init, w);
          loop->loop.step_add = (after - loop->loop.init) & bv::width_mask(w);
        } else {
          // general loop: init/step become explicit statements
          out.push_back(ir::mk_assign(s->loop_var, w, lower_expr(s->loop_init, out)));
        }
        lower_stmts(s->body, loop->body);
        if (!counted) {
          std::vector<ir::StmtPtr> step_side;
          bv::ExprRef stepv = lower_expr(s->loop_step, step_side);
          if (!step_side.empty())
            throw Error(s->loc, "nondet() is not allowed in a loop step");
          loop->body.push_back(ir::mk_assign(s->loop_var, w, stepv));
        }
        out.push_back(loop);
        break;
      }
      case SKind::Step: {
        saw_step_ = true;
        for (const auto& [name, w] : havoc_inputs_)
          out.push_back(ir::mk_havoc(name, w));
        for (const auto& hs : hw_.step) out.push_back(hs);
        out.push_back(ir::mk_step_mark());
        break;
      }
      case SKind::Assume:
        out.push_back(ir::mk_assume(bv::truthy(lower_expr(s->expr, out))));
        break;
      case SKind::Assert: {
        std::string label = s->label;
        int n = ++label_uses_[label];
        if (n > 1) label += "#" + std::to_string(n);
        out.push_back(ir::mk_assert(label, bv::truthy(lower_expr(s->expr, out))));
        break;
      }
      case SKind::SetInput: {
        std::string full = resolve_hw(s->signal, s->loc, true);
        unsigned w = hw_.var_widths.at(full);
        out.push_back(ir::mk_assign(full, w, lower_expr(s->expr, out)));
        break;
      }
      case SKind::Property: {
        for (const auto& ls : fw::lower_property(s->property)) lower_stmt(ls, out);
        break;
      }
    }
  }
};

}  // namespace

ComposedModel compose(const fw::FirmwareProgram& firmware,
                      const synth::SwNetlistProgram& hw) {
  return Composer(firmware, hw).run();
}

}  // namespace coverif::harness
