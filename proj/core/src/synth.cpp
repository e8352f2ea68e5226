// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "coverif/synth.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace coverif::synth {

using rtl::ElaboratedDesign;
using rtl::ModuleAst;

namespace {

constexpr unsigned kMaxUnroll = 4096;

std::string shadow_name(const std::string& sig) { return sig + "__old"; }

// Tarjan SCC over an index graph; components come back topologically
// ordered (sources first).
std::vector<std::vector<int>> scc_topological(
    int n, const std::vector<std::vector<int>>& adj) {
  std::vector<int> index(n, -1), low(n, 0), on_stack(n, 0);
  std::vector<int> stack;
  std::vector<std::vector<int>> comps;
  int counter = 0;

  std::function<void(int)> strongconnect = [&](int v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = 1;
    for (int w : adj[v]) {
      if (index[w] < 0) {
        strongconnect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<int> comp;
      for (;;) {
        int w = stack.back();
        stack.pop_back();
        on_stack[w] = 0;
        comp.push_back(w);
        if (w == v) break;
      }
      std::sort(comp.begin(), comp.end());
      comps.push_back(std::move(comp));
    }
  };
  for (int v = 0; v < n; ++v)
    if (index[v] < 0) strongconnect(v);
  std::reverse(comps.begin(), comps.end());
  return comps;
}

enum class SigKind { Input, Register, Comb, Plain, Clock };

// Flattening context: classification of every hierarchical signal, the
// combinational equation set and the clocked blocks left to translate.
class Builder {
 public:
  explicit Builder(const ElaboratedDesign& d) : d_(d) {}

  const ElaboratedDesign& d_;
  std::map<std::string, unsigned> width_;
  std::map<std::string, SigKind> kind_;
  std::set<std::string> clock_nets_;
  std::string top_clock_;
  std::vector<CombEquation> equations_;
  struct Clocked {
    int inst;
    const rtl::AlwaysBlock* blk;
  };
  std::vector<Clocked> clocked_;
  std::vector<std::pair<std::string, uint64_t>> initial_values_;

  void scan() {
    for (const auto& s : d_.signal_table) width_[s.name] = s.width;
    find_clocks();
    classify();
    build_equations();
  }

  const ModuleAst& mod_at(int inst) const {
    return d_.module_of(d_.instance_tree[inst]);
  }
  const std::string& path_at(int inst) const { return d_.instance_tree[inst].path; }
  const std::map<std::string, uint64_t>& params_at(int inst) const {
    return d_.params.at(d_.instance_tree[inst].module);
  }
  std::string hier(int inst, const std::string& local) const {
    return path_at(inst) + "." + local;
  }

  template <typename F>
  void for_each_binding(F&& f) const {
    for (size_t i = 0; i < d_.instance_tree.size(); ++i) {
      const auto& node = d_.instance_tree[i];
      const ModuleAst& m = d_.modules.at(node.module);
      for (const auto& inst : m.instances) {
        std::string child_path = node.path + "." + inst.instance_name;
        int child = -1;
        for (size_t j = 0; j < d_.instance_tree.size(); ++j)
          if (d_.instance_tree[j].path == child_path) child = static_cast<int>(j);
        const ModuleAst& callee = d_.modules.at(inst.module_name);
        bool positional = !inst.bindings.empty() && inst.bindings.front().first.empty();
        for (size_t b = 0; b < inst.bindings.size(); ++b) {
          const rtl::Port* formal =
              positional ? &callee.ports[b] : callee.find_port(inst.bindings[b].first);
          f(static_cast<int>(i), child, *formal, *inst.bindings[b].second);
        }
      }
    }
  }

  // -- clock analysis --
  void find_clocks() {
    std::vector<std::string> triggers;
    for (size_t i = 0; i < d_.instance_tree.size(); ++i) {
      const ModuleAst& m = mod_at(static_cast<int>(i));
      for (const auto& blk : m.always_blocks)
        if (blk.trigger == rtl::Trigger::Posedge)
          triggers.push_back(hier(static_cast<int>(i), blk.clock));
    }
    if (triggers.empty()) return;

    std::multimap<std::string, std::string> link;
    for_each_binding([&](int parent, int child, const rtl::Port& formal,
                         const rtl::ExprAst& actual) {
      if (actual.kind != rtl::ExprKind::Ident) return;
      std::string a = hier(child, formal.name);
      std::string b = hier(parent, actual.ident);
      link.emplace(a, b);
      link.emplace(b, a);
    });
    auto flood = [&](const std::vector<std::string>& seeds) {
      std::set<std::string> seen;
      std::vector<std::string> work = seeds;
      while (!work.empty()) {
        std::string s = work.back();
        work.pop_back();
        if (!seen.insert(s).second) continue;
        auto [lo, hi] = link.equal_range(s);
        for (auto it = lo; it != hi; ++it) work.push_back(it->second);
      }
      return seen;
    };

    std::set<std::string> closure = flood(triggers);
    std::set<std::string> roots;
    for (const auto& s : d_.signal_table)
      if (s.is_input && closure.contains(s.name)) roots.insert(s.name);
    if (roots.empty())
      throw Error("clock of design '" + d_.top + "' is not a primary input");
    if (roots.size() > 1)
      throw Error("multiple clock signals: all posedge triggers must name one clock");
    top_clock_ = *roots.begin();
    clock_nets_ = flood({top_clock_});
    for (const auto& t : triggers)
      if (!clock_nets_.contains(t))
        throw Error("multiple clock signals: trigger '" + t +
                    "' is not connected to " + top_clock_);
  }

  // -- classification --
  void classify() {
    for (const auto& s : d_.signal_table)
      kind_[s.name] = s.is_input ? SigKind::Input : SigKind::Plain;
    for (const auto& c : clock_nets_)
      if (kind_.contains(c)) kind_[c] = SigKind::Clock;

    for (size_t i = 0; i < d_.instance_tree.size(); ++i) {
      const ModuleAst& m = mod_at(static_cast<int>(i));
      for (const auto& blk : m.always_blocks) {
        std::set<std::string> written;
        collect_writes(blk.body.get(), written);
        for (const auto& w : written) {
          std::string h = hier(static_cast<int>(i), w);
          if (clock_nets_.contains(h))
            throw Error(blk.loc, "clock signal '" + w + "' driven by logic");
          if (blk.trigger == rtl::Trigger::Posedge) {
            if (kind_[h] == SigKind::Register)
              throw Error(blk.loc, "register '" + w +
                                       "' is driven by more than one always block");
            if (kind_[h] == SigKind::Comb)
              throw Error(blk.loc, "signal '" + w + "' mixes clocked and combinational drivers");
            if (kind_[h] == SigKind::Input)
              throw Error(blk.loc, "assignment to primary input '" + w + "'");
            kind_[h] = SigKind::Register;
          } else {
            if (kind_[h] != SigKind::Plain)
              throw Error(blk.loc, "signal '" + w + "' has multiple drivers");
            kind_[h] = SigKind::Comb;
          }
        }
        if (blk.trigger == rtl::Trigger::Posedge)
          check_assign_styles(blk);
      }
    }
  }

  static void collect_writes(const rtl::StmtAst* s, std::set<std::string>& out) {
    if (!s) return;
    switch (s->kind) {
      case rtl::StmtKind::Assign: out.insert(s->lhs.name); break;
      case rtl::StmtKind::Block:
        for (const auto& inner : s->stmts) collect_writes(inner.get(), out);
        break;
      case rtl::StmtKind::If:
        collect_writes(s->then_branch.get(), out);
        collect_writes(s->else_branch.get(), out);
        break;
      case rtl::StmtKind::For: collect_writes(s->body.get(), out); break;
    }
  }

  // Mixing blocking and non-blocking writes to one register makes the
  // shadow discipline ambiguous; reject it.
  static void check_assign_styles(const rtl::AlwaysBlock& blk) {
    std::map<std::string, int> style;
    std::function<void(const rtl::StmtAst*)> walk = [&](const rtl::StmtAst* s) {
      if (!s) return;
      switch (s->kind) {
        case rtl::StmtKind::Assign: {
          int st = s->blocking ? 1 : 2;
          auto [it, fresh] = style.emplace(s->lhs.name, st);
          if (!fresh && it->second != st)
            throw Error(s->loc, "register '" + s->lhs.name +
                                    "' mixes blocking and non-blocking assignment");
          break;
        }
        case rtl::StmtKind::Block:
          for (const auto& inner : s->stmts) walk(inner.get());
          break;
        case rtl::StmtKind::If:
          walk(s->then_branch.get());
          walk(s->else_branch.get());
          break;
        case rtl::StmtKind::For: walk(s->body.get()); break;
      }
    };
    walk(blk.body.get());
  }

  // -- expression lowering --

  struct Scope {
    const Builder* b;
    int inst;
    std::map<std::string, uint64_t> loop_env;
    std::function<bv::ExprRef(const std::string& hier_name, unsigned width)> read;

    std::map<std::string, uint64_t> fold_env() const {
      std::map<std::string, uint64_t> env = b->params_at(inst);
      for (const auto& [k, v] : loop_env) env[k] = v;
      return env;
    }
  };

  bv::ExprRef read_signal(const Scope& sc, const std::string& local,
                          const SourceLoc& at) const {
    const auto& params = params_at(sc.inst);
    if (auto it = sc.loop_env.find(local); it != sc.loop_env.end())
      return bv::constant(it->second & bv::width_mask(32), 32);
    if (auto it = params.find(local); it != params.end()) {
      unsigned bits = 1;
      while (bits < 64 && (it->second >> bits)) ++bits;
      return bv::constant(it->second, std::max(32u, bits));
    }
    std::string h = hier(sc.inst, local);
    auto wit = width_.find(h);
    if (wit == width_.end()) throw Error(at, "unknown identifier '" + local + "'");
    if (clock_nets_.contains(h))
      throw Error(at, "clock signal '" + local + "' used in logic");
    if (sc.read) return sc.read(h, wit->second);
    return bv::var(h, 0, wit->second);
  }

  bv::ExprRef lower(const rtl::ExprAst& e, const Scope& sc) const {
    using rtl::ExprKind;
    switch (e.kind) {
      case ExprKind::Ident:
        return read_signal(sc, e.ident, e.loc);
      case ExprKind::Const:
        return bv::constant(e.value & bv::width_mask(e.inferred_width),
                            e.inferred_width);
      case ExprKind::BitSelect: {
        bv::ExprRef base = read_signal(sc, e.ident, e.loc);
        bv::ExprRef idx = lower(*e.index, sc);
        if (idx->is_const()) {
          if (idx->value >= base->width)
            throw Error(e.loc, "bit-select index out of range");
          return bv::extract(base, static_cast<unsigned>(idx->value),
                             static_cast<unsigned>(idx->value));
        }
        return bv::extract(bv::lshr(base, bv::fit(idx, base->width)), 0, 0);
      }
      case ExprKind::PartSelect: {
        bv::ExprRef base = read_signal(sc, e.ident, e.loc);
        auto env = sc.fold_env();
        uint64_t msb = rtl::fold_const(*e.msb, env);
        uint64_t lsb = rtl::fold_const(*e.lsb, env);
        return bv::extract(base, static_cast<unsigned>(msb),
                           static_cast<unsigned>(lsb));
      }
      case ExprKind::IndexedPart: {
        bv::ExprRef base = read_signal(sc, e.ident, e.loc);
        bv::ExprRef off = lower(*e.index, sc);
        return bv::lower_indexed_part_select(base, off, e.part_width);
      }
      case ExprKind::Concat: {
        bv::ExprRef acc;
        for (const auto& op : e.operands) {
          bv::ExprRef piece = lower(*op, sc);
          acc = acc ? bv::concat(acc, piece) : piece;
        }
        return acc;
      }
      case ExprKind::Unary: {
        bv::ExprRef a = lower(*e.lhs, sc);
        switch (e.un_op) {
          case rtl::UnOp::BitNot: return bv::bv_not(a);
          case rtl::UnOp::LogNot: return bv::lnot(bv::truthy(a));
          case rtl::UnOp::Minus: return bv::neg(a);
          case rtl::UnOp::RedAnd: return bv::redand(a);
          case rtl::UnOp::RedOr: return bv::redor(a);
          case rtl::UnOp::RedXor: return bv::redxor(a);
        }
        break;
      }
      case ExprKind::Binary: {
        bv::ExprRef l = lower(*e.lhs, sc);
        bv::ExprRef r = lower(*e.rhs, sc);
        unsigned w = std::max(l->width, r->width);
        using rtl::BinOp;
        switch (e.bin_op) {
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
      case ExprKind::Ternary: {
        bv::ExprRef c = bv::truthy(lower(*e.cond, sc));
        bv::ExprRef t = lower(*e.lhs, sc);
        bv::ExprRef f = lower(*e.rhs, sc);
        unsigned w = std::max(t->width, f->width);
        return bv::ite(c, bv::fit(t, w), bv::fit(f, w));
      }
    }
    throw Error(e.loc, "cannot lower expression");
  }

  // Name collection matching `lower`, used for closures and shadow sets.
  void collect_reads(const rtl::ExprAst& e, const Scope& sc,
                     std::set<std::string>& out) const {
    using rtl::ExprKind;
    auto base_read = [&](const std::string& ident) {
      if (sc.loop_env.contains(ident) || params_at(sc.inst).contains(ident)) return;
      out.insert(hier(sc.inst, ident));
    };
    switch (e.kind) {
      case ExprKind::Ident: base_read(e.ident); return;
      case ExprKind::Const: return;
      case ExprKind::BitSelect:
      case ExprKind::IndexedPart:
        base_read(e.ident);
        collect_reads(*e.index, sc, out);
        return;
      case ExprKind::PartSelect: base_read(e.ident); return;
      case ExprKind::Concat:
        for (const auto& op : e.operands) collect_reads(*op, sc, out);
        return;
      case ExprKind::Unary: collect_reads(*e.lhs, sc, out); return;
      case ExprKind::Binary:
        collect_reads(*e.lhs, sc, out);
        collect_reads(*e.rhs, sc, out);
        return;
      case ExprKind::Ternary:
        collect_reads(*e.cond, sc, out);
        collect_reads(*e.lhs, sc, out);
        collect_reads(*e.rhs, sc, out);
        return;
    }
  }

  template <typename BodyFn>
  void unroll_for(const rtl::StmtAst& s, const Scope& sc, BodyFn&& body) const {
    auto env = sc.fold_env();
    uint64_t v = rtl::fold_const(*s.loop_init, env);
    unsigned iters = 0;
    for (;;) {
      auto benv = sc.fold_env();
      benv[s.loop_var] = v;
      if (!rtl::fold_const(*s.cond, benv)) break;
      if (++iters > kMaxUnroll)
        throw Error(s.loc, "for-loop exceeds the unrolling limit of " +
                               std::to_string(kMaxUnroll) + " iterations");
      Scope inner = sc;
      inner.loop_env[s.loop_var] = v;
      body(inner);
      v = rtl::fold_const(*s.loop_step, benv);
    }
  }

  // -- combinational equations --

  void mark_comb(const std::string& h, const SourceLoc& at) {
    SigKind k = kind_.at(h);
    if (k == SigKind::Register)
      throw Error(at, "signal '" + h + "' mixes clocked and combinational drivers");
    if (k == SigKind::Comb)
      throw Error(at, "signal '" + h + "' has multiple combinational drivers");
    if (k == SigKind::Input)
      throw Error(at, "combinational driver on primary input '" + h + "'");
    if (k == SigKind::Clock)
      throw Error(at, "clock signal '" + h + "' driven by logic");
    kind_[h] = SigKind::Comb;
  }

  // A slice target keeps the undriven bits at zero; the slice is the only
  // driver of the net (checked during elaboration).
  bv::ExprRef place_in_lvalue(const Scope& sc, const rtl::LValue& lv,
                              bv::ExprRef rhs) const {
    std::string h = hier(sc.inst, lv.name);
    unsigned w = width_.at(h);
    auto env = sc.fold_env();
    switch (lv.kind) {
      case rtl::ExprKind::Ident:
        return bv::fit(rhs, w);
      case rtl::ExprKind::BitSelect: {
        uint64_t idx = rtl::fold_const(*lv.index, env);
        if (idx >= w) throw Error(lv.loc, "bit-select index out of range");
        return bv::lower_bit_assign(bv::constant(0, w), static_cast<unsigned>(idx),
                                    static_cast<unsigned>(idx), rhs);
      }
      case rtl::ExprKind::PartSelect: {
        uint64_t msb = rtl::fold_const(*lv.msb, env);
        uint64_t lsb = rtl::fold_const(*lv.lsb, env);
        return bv::lower_bit_assign(bv::constant(0, w), static_cast<unsigned>(msb),
                                    static_cast<unsigned>(lsb), rhs);
      }
      case rtl::ExprKind::IndexedPart: {
        uint64_t lo = rtl::fold_const(*lv.index, env);
        if (lo + lv.part_width > w)
          throw Error(lv.loc, "indexed part-select out of range");
        return bv::lower_bit_assign(bv::constant(0, w),
                                    static_cast<unsigned>(lo + lv.part_width - 1),
                                    static_cast<unsigned>(lo), rhs);
      }
      default:
        throw Error(lv.loc, "unsupported assignment target");
    }
  }

  void build_equations() {
    for (size_t i = 0; i < d_.instance_tree.size(); ++i) {
      int inst = static_cast<int>(i);
      const ModuleAst& m = mod_at(inst);
      Scope sc{this, inst, {}, nullptr};

      for (const auto& ca : m.continuous_assigns) {
        std::string h = hier(inst, ca.lhs.name);
        mark_comb(h, ca.lhs.loc);
        bv::ExprRef rhs = lower(*ca.rhs, sc);
        equations_.push_back(CombEquation{h, place_in_lvalue(sc, ca.lhs, rhs), inst, false});
      }

      for (const auto& blk : m.always_blocks) {
        if (blk.trigger == rtl::Trigger::Comb)
          if_convert(inst, blk);
        else
          clocked_.push_back(Clocked{inst, &blk});
      }

      for (const auto& ia : m.initial_assigns) {
        std::string h = hier(inst, ia.name);
        if (kind_.at(h) != SigKind::Register)
          throw Error(ia.loc, "initial value on non-register '" + ia.name + "'");
        initial_values_.emplace_back(
            h, rtl::fold_const(*ia.value, params_at(inst)) & bv::width_mask(width_.at(h)));
      }
    }

    // Port bindings become equalities owned by the child instance.
    for_each_binding([&](int parent, int child, const rtl::Port& formal,
                         const rtl::ExprAst& actual) {
      std::string child_sig = hier(child, formal.name);
      if (clock_nets_.contains(child_sig)) return;
      Scope psc{this, parent, {}, nullptr};
      if (formal.dir == rtl::Dir::Input) {
        mark_comb(child_sig, actual.loc);
        equations_.push_back(CombEquation{child_sig, lower(actual, psc), child, true});
      } else {
        rtl::LValue lv;
        lv.kind = actual.kind;
        lv.loc = actual.loc;
        lv.name = actual.ident;
        lv.index = actual.index;
        lv.msb = actual.msb;
        lv.lsb = actual.lsb;
        std::string h = hier(parent, lv.name);
        mark_comb(h, lv.loc);
        bv::ExprRef rhs = bv::var(child_sig, 0, formal.width);
        equations_.push_back(CombEquation{h, place_in_lvalue(psc, lv, rhs), child, true});
      }
    });
  }

  // If-conversion of a combinational always block: one equation per
  // assigned signal, blocking semantics inside the block. A signal
  // assigned on only some paths with no prior value is a latch; rejected.
  void if_convert(int inst, const rtl::AlwaysBlock& blk) {
    std::map<std::string, bv::ExprRef> env;
    Scope sc{this, inst, {}, nullptr};
    sc.read = [&](const std::string& h, unsigned w) -> bv::ExprRef {
      if (auto it = env.find(h); it != env.end()) return it->second;
      return bv::var(h, 0, w);
    };
    if_convert_stmt(*blk.body, inst, sc, env);
    std::vector<std::pair<std::string, bv::ExprRef>> eqs(env.begin(), env.end());
    std::sort(eqs.begin(), eqs.end(), [&](const auto& a, const auto& b) {
      return d_.signal_index.at(a.first) < d_.signal_index.at(b.first);
    });
    // classify() already marked these signals as combinational
    for (auto& [h, rhs] : eqs)
      equations_.push_back(CombEquation{h, rhs, inst, false});
  }

  void if_convert_stmt(const rtl::StmtAst& s, int inst, Scope& sc,
                       std::map<std::string, bv::ExprRef>& env) {
    switch (s.kind) {
      case rtl::StmtKind::Block:
        for (const auto& inner : s.stmts) if_convert_stmt(*inner, inst, sc, env);
        break;
      case rtl::StmtKind::Assign: {
        if (!s.blocking)
          throw Error(s.loc, "non-blocking assignment in combinational always block");
        std::string h = hier(inst, s.lhs.name);
        unsigned w = width_.at(h);
        bv::ExprRef value = lower(*s.rhs, sc);
        if (s.lhs.kind == rtl::ExprKind::Ident) {
          env[h] = bv::fit(value, w);
        } else {
          auto it = env.find(h);
          if (it == env.end())
            throw Error(s.loc, "latch inference: slice of '" + s.lhs.name +
                                   "' written before the full signal is assigned");
          auto fenv = sc.fold_env();
          unsigned hi2, lo2;
          if (s.lhs.kind == rtl::ExprKind::BitSelect) {
            uint64_t idx = rtl::fold_const(*s.lhs.index, fenv);
            if (idx >= w) throw Error(s.loc, "bit-select index out of range");
            hi2 = lo2 = static_cast<unsigned>(idx);
          } else if (s.lhs.kind == rtl::ExprKind::PartSelect) {
            hi2 = static_cast<unsigned>(rtl::fold_const(*s.lhs.msb, fenv));
            lo2 = static_cast<unsigned>(rtl::fold_const(*s.lhs.lsb, fenv));
          } else {
            uint64_t lo = rtl::fold_const(*s.lhs.index, fenv);
            if (lo + s.lhs.part_width > w)
              throw Error(s.loc, "indexed part-select out of range");
            lo2 = static_cast<unsigned>(lo);
            hi2 = lo2 + s.lhs.part_width - 1;
          }
          env[h] = bv::lower_bit_assign(it->second, hi2, lo2, value);
        }
        break;
      }
      case rtl::StmtKind::If: {
        bv::ExprRef cond = bv::truthy(lower(*s.cond, sc));
        auto env_t = env;
        auto env_e = env;
        {
          auto saved = env;
          env = env_t;
          if_convert_stmt(*s.then_branch, inst, sc, env);
          env_t = env;
          env = env_e;
          if (s.else_branch) if_convert_stmt(*s.else_branch, inst, sc, env);
          env_e = env;
          env = saved;
        }
        std::set<std::string> keys;
        for (const auto& [k, v] : env_t) keys.insert(k);
        for (const auto& [k, v] : env_e) keys.insert(k);
        for (const auto& k : keys) {
          auto t = env_t.find(k);
          auto e2 = env_e.find(k);
          bv::ExprRef tv = t != env_t.end() ? t->second : nullptr;
          bv::ExprRef ev = e2 != env_e.end() ? e2->second : nullptr;
          if (!tv || !ev)
            throw Error(s.loc, "latch inference: '" + k +
                                   "' is not assigned on every path of a combinational block");
          env[k] = bv::ite(cond, tv, ev);
        }
        break;
      }
      case rtl::StmtKind::For:
        unroll_for(s, sc, [&](Scope& inner) {
          if_convert_stmt(*s.body, inst, inner, env);
        });
        break;
    }
  }
};

// Equation read names, deduplicated.
std::vector<std::string> equation_reads(const CombEquation& eq) {
  std::vector<const bv::Expr*> vars;
  bv::collect_vars(eq.rhs, vars);
  std::vector<std::string> out;
  for (const auto* v : vars) out.push_back(v->name);
  return out;
}

// Per-block register read policy for clocked translation.
struct BlockPolicy {
  enum State { Blocking = 1, NonBlocking = 2 };
  std::map<std::string, State> state;
};

void translate_stmts(Builder& b, int inst, const rtl::StmtAst& s,
                     Builder::Scope& sc, BlockPolicy& pol,
                     const std::set<std::string>& registers,
                     const std::map<std::string, unsigned>& widths,
                     std::vector<ir::StmtPtr>& out);

void translate_assign(Builder& b, int inst, const rtl::StmtAst& s,
                      Builder::Scope& sc, BlockPolicy& pol,
                      const std::set<std::string>& registers,
                      const std::map<std::string, unsigned>& widths,
                      std::vector<ir::StmtPtr>& out) {
  std::string h = b.hier(inst, s.lhs.name);
  if (!registers.contains(h))
    throw Error(s.loc, "clocked assignment to combinationally driven signal '" +
                           s.lhs.name + "'");
  unsigned w = widths.at(h);
  bv::ExprRef value = b.lower(*s.rhs, sc);
  bv::ExprRef rhs;
  if (s.lhs.kind == rtl::ExprKind::Ident) {
    rhs = bv::fit(value, w);
  } else {
    // read-modify-write against the register variable; slice commits
    // accumulate within the cycle
    auto fenv = sc.fold_env();
    unsigned hi2, lo2;
    if (s.lhs.kind == rtl::ExprKind::BitSelect) {
      uint64_t idx = rtl::fold_const(*s.lhs.index, fenv);
      if (idx >= w) throw Error(s.loc, "bit-select index out of range");
      hi2 = lo2 = static_cast<unsigned>(idx);
    } else if (s.lhs.kind == rtl::ExprKind::PartSelect) {
      hi2 = static_cast<unsigned>(rtl::fold_const(*s.lhs.msb, fenv));
      lo2 = static_cast<unsigned>(rtl::fold_const(*s.lhs.lsb, fenv));
    } else {
      uint64_t lo = rtl::fold_const(*s.lhs.index, fenv);
      if (lo + s.lhs.part_width > w)
        throw Error(s.loc, "indexed part-select out of range");
      lo2 = static_cast<unsigned>(lo);
      hi2 = lo2 + s.lhs.part_width - 1;
    }
    rhs = bv::lower_bit_assign(bv::var(h, 0, w), hi2, lo2, value);
  }
  out.push_back(ir::mk_assign(h, w, rhs));
  pol.state[h] = s.blocking ? BlockPolicy::Blocking : BlockPolicy::NonBlocking;
}

void translate_stmts(Builder& b, int inst, const rtl::StmtAst& s,
                     Builder::Scope& sc, BlockPolicy& pol,
                     const std::set<std::string>& registers,
                     const std::map<std::string, unsigned>& widths,
                     std::vector<ir::StmtPtr>& out) {
  switch (s.kind) {
    case rtl::StmtKind::Block:
      for (const auto& inner : s.stmts)
        translate_stmts(b, inst, *inner, sc, pol, registers, widths, out);
      break;
    case rtl::StmtKind::Assign:
      translate_assign(b, inst, s, sc, pol, registers, widths, out);
      break;
    case rtl::StmtKind::If: {
      bv::ExprRef cond = bv::truthy(b.lower(*s.cond, sc));
      std::vector<ir::StmtPtr> then_out, else_out;
      translate_stmts(b, inst, *s.then_branch, sc, pol, registers, widths, then_out);
      if (s.else_branch)
        translate_stmts(b, inst, *s.else_branch, sc, pol, registers, widths, else_out);
      out.push_back(ir::mk_if(cond, std::move(then_out), std::move(else_out)));
      break;
    }
    case rtl::StmtKind::For:
      b.unroll_for(s, sc, [&](Builder::Scope& inner) {
        translate_stmts(b, inst, *s.body, inner, pol, registers, widths, out);
      });
      break;
  }
}

void translate_clocked(Builder& b, int inst, const rtl::AlwaysBlock& blk,
                       const std::set<std::string>& shadows,
                       const std::set<std::string>& registers,
                       const std::map<std::string, unsigned>& widths,
                       std::vector<ir::StmtPtr>& out) {
  BlockPolicy pol;
  Builder::Scope sc{&b, inst, {}, nullptr};
  // Register reads see the pre-cycle shadow copy unless this block already
  // wrote the register with a blocking assignment (read-latest semantics).
  sc.read = [&b, &pol, &shadows, &registers](const std::string& h,
                                             unsigned w) -> bv::ExprRef {
    if (registers.contains(h)) {
      auto it = pol.state.find(h);
      if (it != pol.state.end() && it->second == BlockPolicy::Blocking)
        return bv::var(h, 0, w);
      if (shadows.contains(h)) return bv::var(shadow_name(h), 0, w);
    }
    return bv::var(h, 0, w);
  };
  translate_stmts(b, inst, *blk.body, sc, pol, registers, widths, out);
}

}  // namespace

// ---- public: comb graph ----

CombDepGraph build_comb_graph(const rtl::ElaboratedDesign& design) {
  Builder b(design);
  b.scan();

  CombDepGraph g;
  g.equations = b.equations_;
  std::map<std::string, size_t> def_of;
  for (size_t i = 0; i < g.equations.size(); ++i) def_of[g.equations[i].lhs] = i;

  // --- signal-level graph ---
  std::vector<std::string> nodes;
  std::map<std::string, int> node_of;
  std::vector<std::vector<int>> adj;
  auto intern = [&](const std::string& n) {
    auto [it, fresh] = node_of.emplace(n, static_cast<int>(nodes.size()));
    if (fresh) {
      nodes.push_back(n);
      adj.emplace_back();
    }
    return it->second;
  };
  for (const auto& eq : g.equations) intern(eq.lhs);
  for (const auto& eq : g.equations) {
    int lhs = node_of.at(eq.lhs);
    for (const auto& r : equation_reads(eq)) {
      int u = intern(r);
      adj[u].push_back(lhs);
      g.edges.emplace_back(r, eq.lhs);
    }
  }

  auto comps = scc_topological(static_cast<int>(nodes.size()), adj);
  std::vector<std::string> ordered;
  for (const auto& comp : comps) {
    std::vector<std::string> names;
    for (int v : comp) names.push_back(nodes[v]);
    bool all_comb = std::all_of(names.begin(), names.end(),
                                [&](const std::string& n) { return def_of.contains(n); });
    for (const auto& n : names) ordered.push_back(n);
    if (all_comb) g.sccs.push_back(std::move(names));
  }
  g.nodes = std::move(ordered);

  // --- instance-level clustering ---
  int ninst = static_cast<int>(design.instance_tree.size());
  std::vector<std::vector<int>> cadj(ninst);
  for (const auto& eq : g.equations)
    for (const auto& r : equation_reads(eq))
      if (auto it = def_of.find(r); it != def_of.end()) {
        int u = g.equations[it->second].owner;
        if (u != eq.owner) cadj[u].push_back(eq.owner);
      }
  auto csccs = scc_topological(ninst, cadj);

  // topological order of equations within one group; empty when cyclic
  auto order_or_cyclic = [&](const std::vector<size_t>& eq_idx,
                             std::vector<size_t>& order) -> bool {
    std::map<std::string, int> local_def;
    for (size_t k = 0; k < eq_idx.size(); ++k)
      local_def[g.equations[eq_idx[k]].lhs] = static_cast<int>(k);
    std::vector<std::vector<int>> ladj(eq_idx.size());
    bool self_loop = false;
    for (size_t k = 0; k < eq_idx.size(); ++k)
      for (const auto& r : equation_reads(g.equations[eq_idx[k]]))
        if (auto it = local_def.find(r); it != local_def.end()) {
          if (it->second == static_cast<int>(k)) self_loop = true;
          ladj[it->second].push_back(static_cast<int>(k));
        }
    auto lcomps = scc_topological(static_cast<int>(eq_idx.size()), ladj);
    bool cyclic = self_loop;
    order.clear();
    for (const auto& comp : lcomps) {
      if (comp.size() > 1) cyclic = true;
      for (int v : comp) order.push_back(eq_idx[v]);
    }
    if (cyclic) order.clear();
    return cyclic;
  };

  for (const auto& comp : csccs) {
    std::vector<size_t> eq_idx;
    for (size_t i = 0; i < g.equations.size(); ++i)
      if (std::binary_search(comp.begin(), comp.end(), g.equations[i].owner))
        eq_idx.push_back(i);
    if (eq_idx.empty()) continue;
    CombDepGraph::Group grp;
    grp.equation_indices = eq_idx;
    std::vector<size_t> order;
    bool cyclic = order_or_cyclic(eq_idx, order);
    grp.feedback = cyclic || comp.size() > 1;
    grp.solvable = !cyclic;
    grp.solve_order = order;
    g.groups.push_back(std::move(grp));
  }
  return g;
}

// ---- public: synthesize ----

SwNetlistProgram synthesize(const rtl::ElaboratedDesign& design) {
  Builder b(design);
  b.scan();
  CombDepGraph graph = build_comb_graph(design);

  SwNetlistProgram p;
  p.top = design.top;
  p.clock = b.top_clock_;

  for (const auto& s : design.signal_table) {
    if (b.clock_nets_.contains(s.name)) continue;
    p.var_widths[s.name] = s.width;
    if (b.kind_.at(s.name) == SigKind::Register)
      p.state_vars.emplace_back(s.name, s.width);
    if (s.is_input) p.inputs.emplace_back(s.name, s.width);
    if (s.is_output) p.outputs.emplace_back(s.name, s.width);
  }
  if (!b.clocked_.empty() && p.clock.empty())
    throw Error("sequential design without a clock");

  const auto& eqs = graph.equations;
  std::map<std::string, size_t> def_of;
  for (size_t i = 0; i < eqs.size(); ++i) def_of[eqs[i].lhs] = i;

  // Emission units: a feedback group is atomic (havoc+assume); acyclic
  // groups dissolve into one unit per equation so each continuous assign
  // lands in its own phase.
  struct Unit {
    bool feedback = false;
    size_t group = 0;              // feedback units
    std::vector<size_t> eq_list;   // equation indices, topological
  };
  std::vector<Unit> units;
  std::map<size_t, size_t> unit_of;  // equation -> unit
  for (size_t gi = 0; gi < graph.groups.size(); ++gi) {
    const auto& grp = graph.groups[gi];
    if (grp.feedback) {
      Unit u;
      u.feedback = true;
      u.group = gi;
      u.eq_list = grp.equation_indices;
      for (size_t e : grp.equation_indices) unit_of[e] = units.size();
      units.push_back(std::move(u));
    } else {
      for (size_t e : grp.solve_order) {
        Unit u;
        u.eq_list = {e};
        unit_of[e] = units.size();
        units.push_back(std::move(u));
      }
    }
  }

  size_t ng = units.size();
  std::vector<std::set<size_t>> gdeps(ng);
  std::vector<bool> reads_state(ng, false);
  for (size_t gi = 0; gi < ng; ++gi)
    for (size_t e : units[gi].eq_list)
      for (const auto& r : equation_reads(eqs[e])) {
        if (auto it = def_of.find(r); it != def_of.end()) {
          size_t src = unit_of.at(it->second);
          if (src != gi) gdeps[gi].insert(src);
        } else if (b.kind_.at(r) != SigKind::Input) {
          reads_state[gi] = true;
        }
      }
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t gi = 0; gi < ng; ++gi)
      if (!reads_state[gi])
        for (size_t dep : gdeps[gi])
          if (reads_state[dep]) {
            reads_state[gi] = true;
            changed = true;
          }
  }

  // --- combinational signals read by the clocked blocks ---
  std::set<std::string> clocked_reads;
  for (const auto& cb : b.clocked_) {
    Builder::Scope sc{&b, cb.inst, {}, nullptr};
    std::function<void(const rtl::StmtAst&, Builder::Scope&)> walk =
        [&](const rtl::StmtAst& s, Builder::Scope& scope) {
          switch (s.kind) {
            case rtl::StmtKind::Assign:
              b.collect_reads(*s.rhs, scope, clocked_reads);
              if (s.lhs.index) b.collect_reads(*s.lhs.index, scope, clocked_reads);
              break;
            case rtl::StmtKind::Block:
              for (const auto& inner : s.stmts) walk(*inner, scope);
              break;
            case rtl::StmtKind::If:
              b.collect_reads(*s.cond, scope, clocked_reads);
              walk(*s.then_branch, scope);
              if (s.else_branch) walk(*s.else_branch, scope);
              break;
            case rtl::StmtKind::For:
              b.unroll_for(s, scope,
                           [&](Builder::Scope& inner) { walk(*s.body, inner); });
              break;
          }
        };
    walk(*cb.blk->body, sc);
  }

  // Units feeding the clocked blocks go before them, with their
  // dependencies; everything else follows the always section.
  std::vector<bool> pre_group(ng, false);
  for (size_t gi = 0; gi < ng; ++gi)
    for (size_t e : units[gi].eq_list)
      if (clocked_reads.contains(eqs[e].lhs)) pre_group[gi] = true;
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t gi = 0; gi < ng; ++gi)
      if (pre_group[gi])
        for (size_t dep : gdeps[gi])
          if (!pre_group[dep]) {
            pre_group[dep] = true;
            changed = true;
          }
  }

  // --- shadow copies: registers read by clocked bodies or by the acyclic
  // pre-phase equations (feedback groups read committed values) ---
  std::set<std::string> registers;
  for (const auto& [n, w] : p.state_vars) registers.insert(n);

  std::set<std::string> shadows;
  for (const auto& r : clocked_reads)
    if (registers.contains(r)) shadows.insert(r);
  for (size_t gi = 0; gi < ng; ++gi) {
    if (!pre_group[gi] || units[gi].feedback) continue;
    for (size_t e : units[gi].eq_list)
      for (const auto& r : equation_reads(eqs[e]))
        if (registers.contains(r)) shadows.insert(r);
  }
  std::vector<std::string> shadow_order;
  for (const auto& s : design.signal_table)
    if (shadows.contains(s.name)) shadow_order.push_back(s.name);
  for (const auto& r : shadow_order)
    p.var_widths[shadow_name(r)] = p.var_widths.at(r);

  auto sub_shadows = [&](const bv::ExprRef& e) {
    return bv::substitute(e, [&](const bv::Expr& v) -> bv::ExprRef {
      if (shadows.contains(v.name))
        return bv::var(shadow_name(v.name), v.version, v.width);
      return bv::var(v.name, v.version, v.width);
    });
  };

  std::vector<bv::ExprRef> all_group_eqs;
  std::set<size_t> feedback_registered;
  auto emit_group = [&](size_t gi, bool pre_phase, std::vector<ir::StmtPtr>& out) {
    const Unit& u = units[gi];
    if (!u.feedback) {
      for (size_t e : u.eq_list) {
        bv::ExprRef rhs = pre_phase ? sub_shadows(eqs[e].rhs) : eqs[e].rhs;
        out.push_back(ir::mk_assign(eqs[e].lhs, p.var_widths.at(eqs[e].lhs), rhs));
      }
      return;
    }
    // havoc all members, then assume the conjunction of their equalities
    const auto& grp = graph.groups[u.group];
    bool first = feedback_registered.insert(gi).second;
    SwNetlistProgram::Cluster cluster;
    bv::ExprRef conj;
    for (size_t e : grp.equation_indices) {
      unsigned w = p.var_widths.at(eqs[e].lhs);
      out.push_back(ir::mk_havoc(eqs[e].lhs, w));
      if (first) {
        cluster.members.push_back(eqs[e].lhs);
        cluster.equations.emplace_back(eqs[e].lhs, eqs[e].rhs);
        all_group_eqs.push_back(bv::eq(bv::var(eqs[e].lhs, 0, w), eqs[e].rhs));
      }
      bv::ExprRef eqx = bv::eq(bv::var(eqs[e].lhs, 0, w), eqs[e].rhs);
      conj = conj ? bv::land(conj, eqx) : eqx;
    }
    if (first) {
      cluster.solvable = grp.solvable;
      for (size_t e : grp.solve_order)
        cluster.solve_order.emplace_back(eqs[e].lhs, eqs[e].rhs);
      p.clusters.push_back(std::move(cluster));
    }
    out.push_back(ir::mk_assume(conj));
  };

  // Stable topological order over groups; equations whose cone stops at
  // primary inputs come first, matching the skeleton's placement.
  auto ordered_groups = [&](const std::vector<size_t>& members) {
    std::vector<size_t> order;
    std::set<size_t> remaining(members.begin(), members.end());
    std::set<size_t> done;
    while (!remaining.empty()) {
      size_t best = SIZE_MAX;
      int best_prio = 3;
      for (size_t gi : remaining) {
        bool ready = std::all_of(gdeps[gi].begin(), gdeps[gi].end(), [&](size_t dp) {
          return done.contains(dp) || !remaining.contains(dp);
        });
        if (!ready) continue;
        int prio = reads_state[gi] ? 1 : 0;
        if (prio < best_prio || (prio == best_prio && gi < best)) {
          best = gi;
          best_prio = prio;
        }
      }
      if (best == SIZE_MAX)
        throw Error("internal: cycle across combinational groups");
      order.push_back(best);
      remaining.erase(best);
      done.insert(best);
    }
    return order;
  };

  std::vector<size_t> pre_members, post_members;
  for (size_t gi = 0; gi < ng; ++gi)
    (pre_group[gi] ? pre_members : post_members).push_back(gi);

  // (1) shadow captures
  for (const auto& r : shadow_order)
    p.step.push_back(ir::mk_assign(shadow_name(r), p.var_widths.at(r),
                                   bv::var(r, 0, p.var_widths.at(r))));
  // (2) combinational logic feeding the clocked blocks; feedback groups
  // settle against pre-commit registers here
  std::vector<size_t> pre_order = ordered_groups(pre_members);
  for (size_t gi : pre_order) emit_group(gi, true, p.step);
  // (3) clocked always blocks
  for (const auto& cb : b.clocked_)
    translate_clocked(b, cb.inst, *cb.blk, shadows, registers, p.var_widths, p.step);
  // (4) remaining combinational logic; feedback groups already placed
  // before the clocked section settle once more so their signals read as
  // post-edge values after the step
  std::vector<size_t> post_all = post_members;
  for (size_t gi : pre_order)
    if (units[gi].feedback) post_all.push_back(gi);
  for (size_t gi : ordered_groups(post_all)) emit_group(gi, false, p.step);

  for (const auto& e : all_group_eqs)
    p.comb_constraint = p.comb_constraint ? bv::land(p.comb_constraint, e) : e;

  // --- init: zero everything, then initial-block constants ---
  std::map<std::string, uint64_t> init_vals;
  for (const auto& [name, value] : b.initial_values_) init_vals[name] = value;
  for (const auto& s : design.signal_table) {
    if (b.clock_nets_.contains(s.name)) continue;
    uint64_t v = init_vals.contains(s.name) ? init_vals.at(s.name) : 0;
    p.init.push_back(ir::mk_assign(s.name, s.width, bv::constant(v, s.width)));
  }
  return p;
}

}  // namespace coverif::synth
