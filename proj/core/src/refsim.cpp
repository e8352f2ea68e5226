// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "coverif/refsim.hpp"

#include <functional>

#include "coverif/bv.hpp"  // width_mask only

namespace coverif::sim {

using rtl::ExprAst;
using rtl::ExprKind;

namespace {
uint64_t mask(unsigned w) { return bv::width_mask(w); }
}  // namespace

RefSim::RefSim(const rtl::ElaboratedDesign& design) : d_(design) { reset(); }

std::string RefSim::resolve(const std::string& name) const {
  if (vals_.contains(name)) return name;
  std::string qual = d_.top + "." + name;
  if (vals_.contains(qual)) return qual;
  throw Error("unknown signal: " + name);
}

void RefSim::reset() {
  vals_.clear();
  for (const auto& s : d_.signal_table) vals_[s.name] = 0;
  for (size_t i = 0; i < d_.instance_tree.size(); ++i) {
    const auto& node = d_.instance_tree[i];
    const auto& mod = d_.module_of(node);
    const auto& params = d_.params.at(node.module);
    for (const auto& ia : mod.initial_assigns) {
      std::string h = node.path + "." + ia.name;
      vals_[h] = rtl::fold_const(*ia.value, params) & mask(d_.signal(h).width);
    }
  }
  settle();
}

void RefSim::set_input(const std::string& name, uint64_t value) {
  std::string h = resolve(name);
  vals_[h] = value & mask(d_.signal(h).width);
}

uint64_t RefSim::get(const std::string& name) const {
  return vals_.at(resolve(name));
}

uint64_t RefSim::eval(const ExprAst& e, int inst,
                      const std::map<std::string, uint64_t>& overlay,
                      const std::map<std::string, uint64_t>& loop_env) const {
  const auto& node = d_.instance_tree[inst];
  const auto& params = d_.params.at(node.module);
  auto read = [&](const std::string& ident) -> uint64_t {
    if (auto it = loop_env.find(ident); it != loop_env.end()) return it->second;
    if (auto it = params.find(ident); it != params.end()) return it->second;
    std::string h = node.path + "." + ident;
    if (auto it = overlay.find(h); it != overlay.end()) return it->second;
    return vals_.at(h);
  };
  auto width_of = [&](const std::string& ident) -> unsigned {
    return d_.signal(node.path + "." + ident).width;
  };

  switch (e.kind) {
    case ExprKind::Ident:
      return read(e.ident) & mask(e.inferred_width);
    case ExprKind::Const:
      return e.value & mask(e.inferred_width);
    case ExprKind::BitSelect: {
      uint64_t base = read(e.ident);
      uint64_t idx = eval(*e.index, inst, overlay, loop_env);
      return idx >= width_of(e.ident) ? 0 : (base >> idx) & 1;
    }
    case ExprKind::PartSelect: {
      uint64_t base = read(e.ident);
      uint64_t lsb = eval(*e.lsb, inst, overlay, loop_env);
      return (base >> lsb) & mask(e.inferred_width);
    }
    case ExprKind::IndexedPart: {
      uint64_t base = read(e.ident);
      uint64_t off = eval(*e.index, inst, overlay, loop_env);
      if (off >= 64) return 0;
      return (base >> off) & mask(e.inferred_width);
    }
    case ExprKind::Concat: {
      uint64_t acc = 0;
      for (const auto& op : e.operands) {
        acc = (acc << op->inferred_width) | eval(*op, inst, overlay, loop_env);
      }
      return acc & mask(e.inferred_width);
    }
    case ExprKind::Unary: {
      uint64_t a = eval(*e.lhs, inst, overlay, loop_env);
      unsigned aw = e.lhs->inferred_width;
      switch (e.un_op) {
        case rtl::UnOp::BitNot: return (~a) & mask(e.inferred_width);
        case rtl::UnOp::LogNot: return a == 0;
        case rtl::UnOp::Minus: return (~a + 1) & mask(e.inferred_width);
        case rtl::UnOp::RedAnd: return a == mask(aw);
        case rtl::UnOp::RedOr: return a != 0;
        case rtl::UnOp::RedXor: return __builtin_parityll(a);
      }
      return 0;
    }
    case ExprKind::Binary: {
      uint64_t a = eval(*e.lhs, inst, overlay, loop_env);
      uint64_t b = eval(*e.rhs, inst, overlay, loop_env);
      uint64_t m = mask(e.inferred_width);
      switch (e.bin_op) {
        case rtl::BinOp::Add: return (a + b) & m;
        case rtl::BinOp::Sub: return (a - b) & m;
        case rtl::BinOp::Mul: return (a * b) & m;
        case rtl::BinOp::Shl: return b >= e.inferred_width ? 0 : (a << b) & m;
        case rtl::BinOp::Shr: return b >= e.lhs->inferred_width ? 0 : (a >> b) & m;
        case rtl::BinOp::And: return (a & b) & m;
        case rtl::BinOp::Or: return (a | b) & m;
        case rtl::BinOp::Xor: return (a ^ b) & m;
        case rtl::BinOp::LogAnd: return a && b;
        case rtl::BinOp::LogOr: return a || b;
        case rtl::BinOp::Eq: return a == b;
        case rtl::BinOp::Ne: return a != b;
        case rtl::BinOp::Lt: return a < b;
        case rtl::BinOp::Le: return a <= b;
        case rtl::BinOp::Gt: return a > b;
        case rtl::BinOp::Ge: return a >= b;
      }
      return 0;
    }
    case ExprKind::Ternary:
      return eval(*e.cond, inst, overlay, loop_env)
                 ? eval(*e.lhs, inst, overlay, loop_env) & mask(e.inferred_width)
                 : eval(*e.rhs, inst, overlay, loop_env) & mask(e.inferred_width);
  }
  return 0;
}

namespace {
// slice placement into a full-width value
uint64_t place(uint64_t old_value, unsigned hi, unsigned lo, uint64_t v) {
  uint64_t field = bv::width_mask(hi - lo + 1);
  return (old_value & ~(field << lo)) | ((v & field) << lo);
}
}  // namespace

void RefSim::run_comb_block(const rtl::AlwaysBlock& blk, int inst,
                            std::map<std::string, uint64_t>& out) {
  const auto& node = d_.instance_tree[inst];
  std::map<std::string, uint64_t> overlay;
  std::map<std::string, uint64_t> loop_env;

  std::function<void(const rtl::StmtAst&)> exec = [&](const rtl::StmtAst& s) {
    switch (s.kind) {
      case rtl::StmtKind::Block:
        for (const auto& inner : s.stmts) exec(*inner);
        break;
      case rtl::StmtKind::Assign: {
        std::string h = node.path + "." + s.lhs.name;
        unsigned w = d_.signal(h).width;
        uint64_t v = eval(*s.rhs, inst, overlay, loop_env);
        uint64_t old = overlay.contains(h) ? overlay.at(h) : vals_.at(h);
        overlay[h] = apply_lvalue(s.lhs, inst, overlay, loop_env, old, w, v);
        break;
      }
      case rtl::StmtKind::If:
        if (eval(*s.cond, inst, overlay, loop_env))
          exec(*s.then_branch);
        else if (s.else_branch)
          exec(*s.else_branch);
        break;
      case rtl::StmtKind::For: {
        uint64_t v = eval(*s.loop_init, inst, overlay, loop_env);
        unsigned iters = 0;
        for (;;) {
          loop_env[s.loop_var] = v;
          if (!eval(*s.cond, inst, overlay, loop_env)) break;
          if (++iters > 4096) throw Error(s.loc, "for-loop exceeds unrolling limit");
          exec(*s.body);
          loop_env[s.loop_var] = v;
          v = eval(*s.loop_step, inst, overlay, loop_env);
        }
        loop_env.erase(s.loop_var);
        break;
      }
    }
  };
  exec(*blk.body);
  for (const auto& [k, v] : overlay) out[k] = v;
}

uint64_t RefSim::apply_lvalue(const rtl::LValue& lv, int inst,
                              const std::map<std::string, uint64_t>& overlay,
                              const std::map<std::string, uint64_t>& loop_env,
                              uint64_t old_value, unsigned width,
                              uint64_t value) const {
  switch (lv.kind) {
    case ExprKind::Ident:
      return value & mask(width);
    case ExprKind::BitSelect: {
      uint64_t idx = eval(*lv.index, inst, overlay, loop_env);
      if (idx >= width) return old_value;
      return place(old_value, static_cast<unsigned>(idx), static_cast<unsigned>(idx), value);
    }
    case ExprKind::PartSelect: {
      uint64_t msb = eval(*lv.msb, inst, overlay, loop_env);
      uint64_t lsb = eval(*lv.lsb, inst, overlay, loop_env);
      return place(old_value, static_cast<unsigned>(msb), static_cast<unsigned>(lsb), value);
    }
    case ExprKind::IndexedPart: {
      uint64_t lo = eval(*lv.index, inst, overlay, loop_env);
      if (lo + lv.part_width > width) return old_value;
      return place(old_value, static_cast<unsigned>(lo + lv.part_width - 1),
                   static_cast<unsigned>(lo), value);
    }
    default:
      return value & mask(width);
  }
}

bool RefSim::sweep_once() {
  bool changed = false;
  auto update = [&](const std::string& h, uint64_t v) {
    auto it = vals_.find(h);
    if (it->second != v) {
      it->second = v;
      changed = true;
    }
  };

  for (size_t i = 0; i < d_.instance_tree.size(); ++i) {
    int inst = static_cast<int>(i);
    const auto& node = d_.instance_tree[i];
    const auto& mod = d_.module_of(node);
    std::map<std::string, uint64_t> empty;

    for (const auto& ca : mod.continuous_assigns) {
      std::string h = node.path + "." + ca.lhs.name;
      unsigned w = d_.signal(h).width;
      uint64_t v = eval(*ca.rhs, inst, empty, empty);
      update(h, apply_lvalue(ca.lhs, inst, empty, empty, 0, w, v));
    }
    for (const auto& blk : mod.always_blocks) {
      if (blk.trigger != rtl::Trigger::Comb) continue;
      std::map<std::string, uint64_t> out;
      run_comb_block(blk, inst, out);
      for (const auto& [h, v] : out) update(h, v);
    }
    // port bindings
    const rtl::ModuleAst& parent_mod = mod;
    for (const auto& instdecl : parent_mod.instances) {
      std::string child_path = node.path + "." + instdecl.instance_name;
      const rtl::ModuleAst& callee = d_.modules.at(instdecl.module_name);
      bool positional =
          !instdecl.bindings.empty() && instdecl.bindings.front().first.empty();
      for (size_t bi = 0; bi < instdecl.bindings.size(); ++bi) {
        const rtl::Port* formal = positional ? &callee.ports[bi]
                                             : callee.find_port(instdecl.bindings[bi].first);
        const ExprAst& actual = *instdecl.bindings[bi].second;
        std::string child_sig = child_path + "." + formal->name;
        if (formal->dir == rtl::Dir::Input) {
          update(child_sig, eval(actual, inst, empty, empty) & mask(formal->width));
        } else {
          std::string h = node.path + "." + actual.ident;
          unsigned w = d_.signal(h).width;
          rtl::LValue lv;
          lv.kind = actual.kind;
          lv.name = actual.ident;
          lv.index = actual.index;
          lv.msb = actual.msb;
          lv.lsb = actual.lsb;
          lv.part_width = actual.part_width;
          update(h, apply_lvalue(lv, inst, empty, empty, 0, w, vals_.at(child_sig)));
        }
      }
    }
  }
  return changed;
}

void RefSim::settle() {
  size_t limit = d_.signal_table.size() + 2;
  for (size_t i = 0; i < limit; ++i)
    if (!sweep_once()) return;
  throw Error("combinational logic of '" + d_.top + "' does not settle");
}

void RefSim::exec_clocked(const rtl::StmtAst& s, int inst,
                          std::map<std::string, uint64_t>& overlay,
                          std::map<std::string, uint64_t>& commits,
                          std::map<std::string, uint64_t>& loop_env) {
  const auto& node = d_.instance_tree[inst];
  switch (s.kind) {
    case rtl::StmtKind::Block:
      for (const auto& inner : s.stmts) exec_clocked(*inner, inst, overlay, commits, loop_env);
      break;
    case rtl::StmtKind::Assign: {
      std::string h = node.path + "." + s.lhs.name;
      unsigned w = d_.signal(h).width;
      uint64_t v = eval(*s.rhs, inst, overlay, loop_env);
      uint64_t old = commits.contains(h) ? commits.at(h) : vals_.at(h);
      uint64_t full = apply_lvalue(s.lhs, inst, overlay, loop_env, old, w, v);
      commits[h] = full;
      if (s.blocking) overlay[h] = full;
      break;
    }
    case rtl::StmtKind::If:
      if (eval(*s.cond, inst, overlay, loop_env))
        exec_clocked(*s.then_branch, inst, overlay, commits, loop_env);
      else if (s.else_branch)
        exec_clocked(*s.else_branch, inst, overlay, commits, loop_env);
      break;
    case rtl::StmtKind::For: {
      uint64_t v = eval(*s.loop_init, inst, overlay, loop_env);
      unsigned iters = 0;
      for (;;) {
        loop_env[s.loop_var] = v;
        if (!eval(*s.cond, inst, overlay, loop_env)) break;
        if (++iters > 4096) throw Error(s.loc, "for-loop exceeds unrolling limit");
        exec_clocked(*s.body, inst, overlay, commits, loop_env);
        loop_env[s.loop_var] = v;
        v = eval(*s.loop_step, inst, overlay, loop_env);
      }
      loop_env.erase(s.loop_var);
      break;
    }
  }
}

void RefSim::step() {
  settle();
  std::map<std::string, uint64_t> commits;
  for (size_t i = 0; i < d_.instance_tree.size(); ++i) {
    const auto& mod = d_.module_of(d_.instance_tree[i]);
    for (const auto& blk : mod.always_blocks) {
      if (blk.trigger != rtl::Trigger::Posedge) continue;
      std::map<std::string, uint64_t> overlay, loop_env;
      exec_clocked(*blk.body, static_cast<int>(i), overlay, commits, loop_env);
    }
  }
  for (const auto& [h, v] : commits) vals_[h] = v;
  settle();
}

}  // namespace coverif::sim
