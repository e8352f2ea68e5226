// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "coverif/elaborate.hpp"

#include <algorithm>
#include <set>

#include "coverif/bv.hpp"

namespace coverif::rtl {

const SignalInfo& ElaboratedDesign::signal(const std::string& hier_name) const {
  auto it = signal_index.find(hier_name);
  if (it == signal_index.end()) throw Error("unknown signal: " + hier_name);
  return signal_table[it->second];
}

namespace {

unsigned bits_needed(uint64_t v) {
  unsigned n = 1;
  while (v >> n) ++n;
  return n;
}

uint64_t fold_unary(UnOp op, uint64_t a) {
  switch (op) {
    case UnOp::BitNot: return ~a;  // folded values are width-checked by callers
    case UnOp::LogNot: return a == 0;
    case UnOp::Minus: return static_cast<uint64_t>(-static_cast<int64_t>(a));
    case UnOp::RedAnd: return a == ~uint64_t{0};
    case UnOp::RedOr: return a != 0;
    case UnOp::RedXor: return __builtin_parityll(a);
  }
  return 0;
}

uint64_t fold_binary(BinOp op, uint64_t a, uint64_t b, const SourceLoc& at) {
  switch (op) {
    case BinOp::Add: return a + b;
    case BinOp::Sub: return a - b;
    case BinOp::Mul: return a * b;
    case BinOp::Shl: return b >= 64 ? 0 : a << b;
    case BinOp::Shr: return b >= 64 ? 0 : a >> b;
    case BinOp::And: return a & b;
    case BinOp::Or: return a | b;
    case BinOp::Xor: return a ^ b;
    case BinOp::LogAnd: return a && b;
    case BinOp::LogOr: return a || b;
    case BinOp::Eq: return a == b;
    case BinOp::Ne: return a != b;
    case BinOp::Lt: return a < b;
    case BinOp::Le: return a <= b;
    case BinOp::Gt: return a > b;
    case BinOp::Ge: return a >= b;
  }
  throw Error(at, "unfoldable operator");
}

// Per-module symbol and width context used during annotation.
struct ModuleCtx {
  ModuleAst* mod = nullptr;
  std::map<std::string, unsigned> widths;       // ports and nets
  std::map<std::string, uint64_t> params;       // folded parameters
  std::set<std::string> loop_vars;              // in scope during body walks
};

class Elaborator {
 public:
  Elaborator(std::vector<ModuleAst> modules, std::string top)
      : top_(std::move(top)) {
    for (auto& m : modules) {
      if (design_.modules.contains(m.name))
        throw Error(m.loc, "duplicate module name '" + m.name + "'");
      design_.modules.emplace(m.name, std::move(m));
    }
  }

  ElaboratedDesign run() {
    if (!design_.modules.contains(top_))
      throw Error("unknown module " + top_);
    design_.top = top_;
    for (auto& [name, mod] : design_.modules) prepare_module(mod);
    std::vector<std::string> stack;
    build_instance(top_, top_, -1, stack);
    return std::move(design_);
  }

 private:
  std::string top_;
  ElaboratedDesign design_;
  std::map<std::string, ModuleCtx> ctx_;

  ModuleCtx& ctx_of(const std::string& name) { return ctx_.at(name); }

  void prepare_module(ModuleAst& mod) {
    ModuleCtx mc;
    mc.mod = &mod;

    // Fold parameters first; later parameters may reference earlier ones.
    for (const auto& [pname, pexpr] : mod.parameters) {
      if (mc.params.contains(pname) || mod.find_port(pname) || mod.find_net(pname))
        throw Error(mod.loc, "redefinition of '" + pname + "' in module " + mod.name);
      mc.params[pname] = fold_const(*pexpr, mc.params);
    }

    auto range_width = [&](const Range& r, const SourceLoc& at) -> unsigned {
      if (r.scalar()) return 1;
      uint64_t msb = fold_const(*r.msb, mc.params);
      uint64_t lsb = fold_const(*r.lsb, mc.params);
      if (lsb != 0)
        throw Error(at, "unsupported construct: range with non-zero base [" +
                            std::to_string(msb) + ":" + std::to_string(lsb) + "]");
      if (msb >= 64)
        throw Error(at, "net wider than 64 bits is not supported");
      return static_cast<unsigned>(msb - lsb + 1);
    };

    for (auto& p : mod.ports) p.width = range_width(p.range, p.loc);

    // A net declaration may refine a port of the same name (`output q;`
    // plus `reg [2:0] q;`): a rangeless port inherits the net's range,
    // explicit ranges on both must agree.
    for (auto& n : mod.nets) {
      n.width = range_width(n.range, n.loc);
      if (const Port* p = mod.find_port(n.name)) {
        if (!p->range.scalar() && !n.range.scalar() && p->width != n.width)
          throw Error(n.loc, "redeclaration of '" + n.name + "' with different width");
      }
    }
    for (auto& p : mod.ports) {
      unsigned w = p.width;
      if (const Net* n = mod.find_net(p.name); n && !n->range.scalar()) w = n->width;
      mc.widths[p.name] = w;
      p.width = w;
    }
    for (auto& n : mod.nets) {
      auto it = mc.widths.find(n.name);
      if (it == mc.widths.end()) {
        mc.widths[n.name] = n.width;
      } else if (const Port* p = mod.find_port(n.name); !p) {
        throw Error(n.loc, "duplicate net declaration '" + n.name + "'");
      } else {
        n.width = mc.widths[n.name];
      }
    }

    ctx_[mod.name] = std::move(mc);
  }

  // Annotate after every module's widths are known (instances need the
  // callee's port widths).
  void annotate_module(const std::string& name) {
    if (annotated_.contains(name)) return;
    annotated_.insert(name);
    ModuleCtx& mc = ctx_of(name);
    ModuleAst& mod = *mc.mod;

    for (auto& ca : mod.continuous_assigns) {
      annotate_lvalue(ca.lhs, mc);
      annotate_expr(*ca.rhs, mc);
      check_driver(mod, ca.lhs);
    }
    for (auto& blk : mod.always_blocks) {
      if (blk.trigger == Trigger::Posedge && !mc.widths.contains(blk.clock))
        throw Error(blk.loc, "unknown clock signal '" + blk.clock + "'");
      annotate_stmt(*blk.body, mc);
    }
    for (auto& ia : mod.initial_assigns) {
      if (!mc.widths.contains(ia.name))
        throw Error(ia.loc, "initial assignment to unknown signal '" + ia.name + "'");
      fold_const(*ia.value, mc.params);  // must be constant
      annotate_expr(*ia.value, mc);
    }
    for (auto& inst : mod.instances) {
      for (auto& [formal, actual] : inst.bindings) annotate_expr(*actual, mc);
    }
  }

  void check_driver(ModuleAst& mod, const LValue& lv) {
    if (const Port* p = mod.find_port(lv.name); p && p->dir == Dir::Input)
      throw Error(lv.loc, "continuous assignment to input port '" + lv.name + "'");
    int count = 0;
    for (const auto& ca : mod.continuous_assigns)
      if (ca.lhs.name == lv.name) ++count;
    if (count > 1)
      throw Error(lv.loc, "net '" + lv.name + "' has multiple continuous drivers");
    for (const auto& blk : mod.always_blocks)
      if (writes(blk.body.get(), lv.name))
        throw Error(lv.loc, "net '" + lv.name +
                                "' is driven by both a continuous assign and an always block");
  }

  static bool writes(const StmtAst* s, const std::string& name) {
    if (!s) return false;
    switch (s->kind) {
      case StmtKind::Assign: return s->lhs.name == name;
      case StmtKind::Block:
        return std::any_of(s->stmts.begin(), s->stmts.end(),
                           [&](const StmtPtr& p) { return writes(p.get(), name); });
      case StmtKind::If:
        return writes(s->then_branch.get(), name) || writes(s->else_branch.get(), name);
      case StmtKind::For: return writes(s->body.get(), name);
    }
    return false;
  }

  void annotate_stmt(StmtAst& s, ModuleCtx& mc) {
    switch (s.kind) {
      case StmtKind::Block:
        for (auto& inner : s.stmts) annotate_stmt(*inner, mc);
        break;
      case StmtKind::If:
        annotate_expr(*s.cond, mc);
        annotate_stmt(*s.then_branch, mc);
        if (s.else_branch) annotate_stmt(*s.else_branch, mc);
        break;
      case StmtKind::Assign: {
        if (const Port* p = mc.mod->find_port(s.lhs.name); p && p->dir == Dir::Input)
          throw Error(s.lhs.loc, "assignment to input port '" + s.lhs.name + "'");
        annotate_lvalue(s.lhs, mc);
        annotate_expr(*s.rhs, mc);
        break;
      }
      case StmtKind::For: {
        annotate_expr(*s.loop_init, mc);
        bool fresh = !mc.widths.contains(s.loop_var) && !mc.params.contains(s.loop_var);
        if (fresh) mc.loop_vars.insert(s.loop_var);
        annotate_expr(*s.cond, mc);
        annotate_expr(*s.loop_step, mc);
        annotate_stmt(*s.body, mc);
        if (fresh) mc.loop_vars.erase(s.loop_var);
        break;
      }
    }
  }

  unsigned width_of(const std::string& name, ModuleCtx& mc, const SourceLoc& at) {
    if (auto it = mc.widths.find(name); it != mc.widths.end()) return it->second;
    if (mc.params.contains(name))
      return std::max(32u, bits_needed(mc.params.at(name)));
    if (mc.loop_vars.contains(name)) return 32;
    throw Error(at, "unknown identifier '" + name + "' in module " + mc.mod->name);
  }

  void annotate_lvalue(LValue& lv, ModuleCtx& mc) {
    unsigned base = width_of(lv.name, mc, lv.loc);
    switch (lv.kind) {
      case ExprKind::Ident:
        break;
      case ExprKind::BitSelect:
        annotate_expr(*lv.index, mc);
        break;
      case ExprKind::PartSelect: {
        uint64_t msb = fold_const(*lv.msb, mc.params);
        uint64_t lsb = fold_const(*lv.lsb, mc.params);
        if (lsb > msb || msb >= base)
          throw Error(lv.loc, "part-select out of range");
        annotate_expr(*lv.msb, mc);
        annotate_expr(*lv.lsb, mc);
        break;
      }
      case ExprKind::IndexedPart:
        annotate_expr(*lv.index, mc);
        if (lv.part_width == 0 || lv.part_width > base)
          throw Error(lv.loc, "indexed part-select width out of range");
        break;
      default:
        break;
    }
  }

  unsigned annotate_expr(ExprAst& e, ModuleCtx& mc) {
    switch (e.kind) {
      case ExprKind::Ident:
        e.inferred_width = width_of(e.ident, mc, e.loc);
        break;
      case ExprKind::Const:
        e.inferred_width = e.sized ? e.const_width
                                   : std::max(32u, bits_needed(e.value));
        break;
      case ExprKind::BitSelect: {
        unsigned base = width_of(e.ident, mc, e.loc);
        annotate_expr(*e.base, mc);
        unsigned iw = annotate_expr(*e.index, mc);
        (void)iw;
        if (is_const_no_vars(*e.index, mc)) {
          uint64_t idx = fold_const(*e.index, mc.params);
          if (idx >= base) throw Error(e.loc, "bit-select index out of range");
        }
        e.inferred_width = 1;
        break;
      }
      case ExprKind::PartSelect: {
        unsigned base = width_of(e.ident, mc, e.loc);
        annotate_expr(*e.base, mc);
        uint64_t msb = fold_const(*e.msb, mc.params);
        uint64_t lsb = fold_const(*e.lsb, mc.params);
        if (lsb > msb || msb >= base)
          throw Error(e.loc, "part-select [" + std::to_string(msb) + ":" +
                                 std::to_string(lsb) + "] out of range for width " +
                                 std::to_string(base));
        annotate_expr(*e.msb, mc);
        annotate_expr(*e.lsb, mc);
        e.inferred_width = static_cast<unsigned>(msb - lsb + 1);
        break;
      }
      case ExprKind::IndexedPart: {
        unsigned base = width_of(e.ident, mc, e.loc);
        annotate_expr(*e.base, mc);
        annotate_expr(*e.index, mc);
        if (e.part_width == 0 || e.part_width > base)
          throw Error(e.loc, "indexed part-select width out of range");
        e.inferred_width = e.part_width;
        break;
      }
      case ExprKind::Concat: {
        unsigned total = 0;
        for (auto& op : e.operands) {
          if (op->kind == ExprKind::Const && !op->sized)
            throw Error(op->loc, "unsized constant in concatenation");
          total += annotate_expr(*op, mc);
        }
        if (total > 64) throw Error(e.loc, "concatenation wider than 64 bits");
        e.inferred_width = total;
        break;
      }
      case ExprKind::Unary: {
        unsigned w = annotate_expr(*e.lhs, mc);
        switch (e.un_op) {
          case UnOp::BitNot:
          case UnOp::Minus:
            e.inferred_width = w;
            break;
          default:
            e.inferred_width = 1;  // logical not and reductions
            break;
        }
        break;
      }
      case ExprKind::Binary: {
        unsigned lw = annotate_expr(*e.lhs, mc);
        unsigned rw = annotate_expr(*e.rhs, mc);
        switch (e.bin_op) {
          case BinOp::Add: case BinOp::Sub: case BinOp::Mul:
          case BinOp::And: case BinOp::Or: case BinOp::Xor:
            e.inferred_width = std::max(lw, rw);
            break;
          case BinOp::Shl: case BinOp::Shr:
            e.inferred_width = lw;  // shift amount is self-determined
            break;
          default:
            e.inferred_width = 1;  // comparisons and logical connectives
            break;
        }
        break;
      }
      case ExprKind::Ternary: {
        annotate_expr(*e.cond, mc);
        unsigned tw = annotate_expr(*e.lhs, mc);
        unsigned ew = annotate_expr(*e.rhs, mc);
        e.inferred_width = std::max(tw, ew);
        break;
      }
    }
    if (e.inferred_width == 0 || e.inferred_width > 64)
      throw Error(e.loc, "expression width out of range");
    return e.inferred_width;
  }

  bool is_const_no_vars(const ExprAst& e, ModuleCtx& mc) {
    switch (e.kind) {
      case ExprKind::Const: return true;
      case ExprKind::Ident: return mc.params.contains(e.ident);
      case ExprKind::Unary: return is_const_no_vars(*e.lhs, mc);
      case ExprKind::Binary:
        return is_const_no_vars(*e.lhs, mc) && is_const_no_vars(*e.rhs, mc);
      case ExprKind::Ternary:
        return is_const_no_vars(*e.cond, mc) && is_const_no_vars(*e.lhs, mc) &&
               is_const_no_vars(*e.rhs, mc);
      default: return false;
    }
  }

  void build_instance(const std::string& module_name, const std::string& path,
                      int parent, std::vector<std::string>& stack) {
    auto it = design_.modules.find(module_name);
    if (it == design_.modules.end())
      throw Error("unknown module " + module_name);
    if (std::find(stack.begin(), stack.end(), module_name) != stack.end())
      throw Error("recursive instantiation of module " + module_name);
    annotate_module(module_name);
    const ModuleAst& mod = it->second;
    design_.params[module_name] = ctx_of(module_name).params;

    int self = static_cast<int>(design_.instance_tree.size());
    design_.instance_tree.push_back(InstanceNode{path, module_name, parent});

    // Signals in declaration order: ports first, then non-port nets.
    std::set<std::string> seen;
    auto add_signal = [&](const std::string& local, NetKind kind, unsigned width) {
      if (!seen.insert(local).second) return;
      SignalInfo info;
      info.name = path + "." + local;
      info.kind = kind;
      info.width = width;
      design_.signal_index[info.name] = design_.signal_table.size();
      design_.signal_table.push_back(std::move(info));
    };
    for (const auto& p : mod.ports) {
      if (p.dir == Dir::Inout)
        throw Error(p.loc, "inout ports are not supported");
      NetKind kind = NetKind::Wire;
      if (const Net* n = mod.find_net(p.name)) kind = n->kind;
      add_signal(p.name, kind, p.width);
      if (parent == -1) {
        SignalInfo& info = design_.signal_table.back();
        info.is_input = p.dir == Dir::Input;
        info.is_output = p.dir == Dir::Output;
      }
    }
    for (const auto& n : mod.nets) add_signal(n.name, n.kind, n.width);

    stack.push_back(module_name);
    for (const auto& inst : mod.instances) {
      bind_ports(mod, inst);
      build_instance(inst.module_name, path + "." + inst.instance_name, self, stack);
    }
    stack.pop_back();
  }

  void bind_ports(const ModuleAst& parent, const Instance& inst) {
    auto it = design_.modules.find(inst.module_name);
    if (it == design_.modules.end())
      throw Error(inst.loc, "unknown module " + inst.module_name);
    const ModuleAst& callee = it->second;

    std::map<std::string, const ExprAst*> bound;
    bool positional = !inst.bindings.empty() && inst.bindings.front().first.empty();
    if (positional) {
      if (inst.bindings.size() != callee.ports.size())
        throw Error(inst.loc, "instance '" + inst.instance_name + "' binds " +
                                  std::to_string(inst.bindings.size()) + " ports, module " +
                                  callee.name + " has " + std::to_string(callee.ports.size()));
      for (size_t i = 0; i < inst.bindings.size(); ++i)
        bound[callee.ports[i].name] = inst.bindings[i].second.get();
    } else {
      for (const auto& [formal, actual] : inst.bindings) {
        if (!callee.find_port(formal))
          throw Error(inst.loc, "module " + callee.name + " has no port '" + formal + "'");
        if (bound.contains(formal))
          throw Error(inst.loc, "port '" + formal + "' bound twice");
        bound[formal] = actual.get();
      }
    }
    for (const auto& p : callee.ports) {
      auto b = bound.find(p.name);
      if (b == bound.end())
        throw Error(inst.loc, "unbound formal port '" + p.name + "' of module " + callee.name);
      const ExprAst& actual = *b->second;
      if (actual.inferred_width != p.width)
        throw Error(inst.loc, "width mismatch in binding of port '" + p.name + "': formal is " +
                                  std::to_string(p.width) + " bits, actual is " +
                                  std::to_string(actual.inferred_width));
      if (p.dir == Dir::Output && actual.kind != ExprKind::Ident &&
          actual.kind != ExprKind::BitSelect && actual.kind != ExprKind::PartSelect)
        throw Error(inst.loc, "output port '" + p.name + "' must be bound to a net");
    }
  }

  std::set<std::string> annotated_;
};

}  // namespace

uint64_t fold_const(const ExprAst& e, const std::map<std::string, uint64_t>& env) {
  switch (e.kind) {
    case ExprKind::Const:
      return e.value;
    case ExprKind::Ident: {
      auto it = env.find(e.ident);
      if (it == env.end())
        throw Error(e.loc, "expression is not constant: '" + e.ident + "'");
      return it->second;
    }
    case ExprKind::Unary:
      return fold_unary(e.un_op, fold_const(*e.lhs, env));
    case ExprKind::Binary:
      return fold_binary(e.bin_op, fold_const(*e.lhs, env), fold_const(*e.rhs, env), e.loc);
    case ExprKind::Ternary:
      return fold_const(*e.cond, env) ? fold_const(*e.lhs, env) : fold_const(*e.rhs, env);
    default:
      throw Error(e.loc, "expression is not constant");
  }
}

ElaboratedDesign elaborate(std::vector<ModuleAst> modules, const std::string& top) {
  return Elaborator(std::move(modules), top).run();
}

}  // namespace coverif::rtl
