// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "coverif/symex.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <memory>
#include <set>

#include "coverif/bitblast.hpp"

namespace coverif::symex {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

// One path-condition entry. Paths share their prefixes; a node is either a
// constraint (conjunct of the path condition) or a havoc record.
struct SegNode {
  std::shared_ptr<const SegNode> parent;
  size_t depth = 0;  // number of nodes up to and including this one

  bv::ExprRef constraint;      // null for havoc nodes
  bool encode_skip = false;    // definitional constant, substituted everywhere

  // havoc record
  std::string havoc_name;
  unsigned havoc_version = 0;
  unsigned havoc_width = 0;
  int havoc_cycle = -1;

  // full-incremental activation literal, allocated on first encode
  mutable sat::Lit activation = sat::lit_undef;
  mutable bool encoded = false;
};
using SegPtr = std::shared_ptr<const SegNode>;

struct SymState {
  std::map<std::string, unsigned> versions;  // name -> current version
  SegPtr chain;
  size_t pc = 0;
  size_t depth = 0;  // statements executed along this path
};

class Engine {
 public:
  Engine(const ir::Program& program, const Config& config)
      : prog_(program), config_(config), instrs_(ir::flatten(program)) {}

  Verdict run() {
    auto t0 = std::chrono::steady_clock::now();
    Verdict v = explore();
    v.stats.total_time_ms = ms_since(t0);
    v.stats.branch_attempts = v.stats.pruned + v.stats.completed_paths;
    return v;
  }

 private:
  const ir::Program& prog_;
  Config config_;
  std::vector<ir::Instr> instrs_;
  ExplorationStats stats_;

  std::map<std::string, unsigned> next_version_;
  std::set<std::string> read_seen_;
  std::map<std::pair<std::string, unsigned>, uint64_t> const_store_;

  // solver state
  std::unique_ptr<blast::CnfInstance> instance_;
  SegPtr live_;          // encoded prefix (partial mode)
  bool full_mode_dead_ = false;
  std::vector<std::pair<std::weak_ptr<const SegNode>, sat::Lit>> activations_;

  unsigned width_of(const std::string& name) const {
    auto it = prog_.var_widths.find(name);
    if (it == prog_.var_widths.end())
      throw Error("internal: unknown variable in program: " + name);
    return it->second;
  }

  unsigned current_version(const SymState& st, const std::string& name) const {
    auto it = st.versions.find(name);
    return it == st.versions.end() ? 1 : it->second;
  }

  unsigned fresh_version(SymState& st, const std::string& name) {
    auto [it, fresh] = next_version_.try_emplace(name, 1);
    unsigned v = ++it->second;
    st.versions[name] = v;
    return v;
  }

  // A havoc that is the variable's first event binds the free initial
  // version (reset_1 in the path constraints); later havocs get fresh ones.
  unsigned havoc_version(SymState& st, const std::string& name) {
    if (!next_version_.contains(name) && !read_seen_.contains(name)) {
      next_version_[name] = 1;
      st.versions[name] = 1;
      return 1;
    }
    return fresh_version(st, name);
  }

  bv::ExprRef rename(const SymState& st, const bv::ExprRef& e) {
    return bv::substitute(e, [&](const bv::Expr& var) -> bv::ExprRef {
      read_seen_.insert(var.name);
      unsigned ver = current_version(st, var.name);
      if (auto it = const_store_.find({var.name, ver}); it != const_store_.end())
        return bv::constant(it->second, var.width);
      return bv::var(var.name, ver, var.width);
    });
  }

  static SegPtr append(const SegPtr& chain, SegNode node) {
    node.parent = chain;
    node.depth = (chain ? chain->depth : 0) + 1;
    return std::make_shared<const SegNode>(std::move(node));
  }

  SegPtr add_constraint(const SegPtr& chain, bv::ExprRef c, bool skip) {
    SegNode n;
    n.constraint = std::move(c);
    n.encode_skip = skip;
    return append(chain, std::move(n));
  }

  SegPtr add_havoc(const SegPtr& chain, const std::string& name, unsigned version,
                   unsigned width, int cycle) {
    SegNode n;
    n.havoc_name = name;
    n.havoc_version = version;
    n.havoc_width = width;
    n.havoc_cycle = cycle;
    return append(chain, std::move(n));
  }

  // ---- solver plumbing ----

  void encode_node(const SegPtr& n) {
    if (n->constraint) {
      if (config_.mode == Mode::FullIncremental) {
        n->activation = instance_->fresh_lit();
        activations_.emplace_back(std::weak_ptr<const SegNode>(n), n->activation);
        instance_->assert_implies(n->activation, n->constraint);
      } else {
        instance_->assert_true(n->constraint);
      }
    } else {
      instance_->touch_var(n->havoc_name, n->havoc_version, n->havoc_width);
    }
    n->encoded = true;
  }

  // suffix of `chain` strictly below `base`, root-first
  void collect_suffix(const SegPtr& chain, const SegPtr& base,
                      std::vector<SegPtr>& out) {
    out.clear();
    SegPtr n = chain;
    size_t base_depth = base ? base->depth : 0;
    while (n && n->depth > base_depth) {
      out.push_back(n);
      n = n->parent;
    }
    if (n.get() != base.get())
      throw Error("internal: path is not an extension of the encoded prefix");
    std::reverse(out.begin(), out.end());
  }

  bool is_extension(const SegPtr& chain, const SegPtr& base) {
    size_t base_depth = base ? base->depth : 0;
    if ((chain ? chain->depth : 0) < base_depth) return false;
    const SegNode* n = chain.get();
    while (n && n->depth > base_depth) n = n->parent.get();
    return n == base.get();
  }

  // Ensure the instance encodes `chain`; returns the assumption literals
  // that activate it (full mode only).
  std::vector<sat::Lit> prepare(const SegPtr& chain) {
    std::vector<sat::Lit> assumptions;
    if (config_.mode == Mode::PartialIncremental) {
      if (!instance_ || !is_extension(chain, live_)) {
        // a different path: fresh instance, re-encode the prefix
        instance_ = std::make_unique<blast::CnfInstance>();
        ++stats_.solver_instances;
        live_ = nullptr;
      }
      std::vector<SegPtr> suffix;
      collect_suffix(chain, live_, suffix);
      for (const SegPtr& n : suffix)
        if (!n->encode_skip) encode_node(n);
      live_ = chain;
      return assumptions;
    }
    // full-incremental: one global instance, segments guarded by
    // activation literals passed as solver assumptions
    if (!instance_) {
      instance_ = std::make_unique<blast::CnfInstance>();
      ++stats_.solver_instances;
    }
    sweep_dead_activations();
    for (SegPtr n = chain; n; n = n->parent)
      if (!n->encoded && !n->encode_skip) encode_node(n);
    for (const SegNode* n = chain.get(); n; n = n->parent.get())
      if (n->constraint && !n->encode_skip && !(n->activation == sat::lit_undef))
        assumptions.push_back(n->activation);
    return assumptions;
  }

  // Backtracking in full mode: a segment no live path references anymore
  // gets its activation literal asserted false as a unit clause.
  void sweep_dead_activations() {
    size_t j = 0;
    for (size_t i = 0; i < activations_.size(); ++i) {
      if (activations_[i].first.expired()) {
        instance_->solver().add_clause({~activations_[i].second});
      } else {
        activations_[j++] = activations_[i];
      }
    }
    activations_.resize(j);
  }

  sat::Status timed_solve(const std::vector<sat::Lit>& assumptions) {
    auto t0 = std::chrono::steady_clock::now();
    ++stats_.solver_calls;
    sat::Status st = instance_->solve(assumptions);
    stats_.solve_time_ms += ms_since(t0);
    return st;
  }

  bool is_feasible(const SegPtr& chain, const bv::ExprRef& cond) {
    if (cond->is_const()) return cond->value != 0;
    std::vector<sat::Lit> assumptions = prepare(chain);
    assumptions.push_back(instance_->bitblast(cond));
    return timed_solve(assumptions) == sat::Status::Sat;
  }

  // ---- trace building ----

  Trace build_trace(const SegPtr& chain, const std::string& label, int cycle) {
    Trace t;
    t.violated_assert = label;
    t.violation_cycle = cycle;
    std::vector<const SegNode*> nodes;
    for (const SegNode* n = chain.get(); n; n = n->parent.get()) nodes.push_back(n);
    std::reverse(nodes.begin(), nodes.end());
    for (const SegNode* n : nodes) {
      if (!n->constraint && !n->havoc_name.empty()) {
        TraceHavoc h;
        h.cycle = n->havoc_cycle < 0 ? 0 : n->havoc_cycle;
        h.name = n->havoc_name;
        h.version = n->havoc_version;
        h.value = instance_->model_value(n->havoc_name, n->havoc_version, n->havoc_width);
        t.havocs.push_back(std::move(h));
      }
    }
    for (const auto& [name, ver, value] : instance_->model_vars())
      t.model.emplace_back(name + "_" + std::to_string(ver), value);
    return t;
  }

  // ---- main loop ----

  bool budget_exhausted() const {
    return config_.max_attempts != 0 &&
           stats_.pruned + stats_.completed_paths >= config_.max_attempts;
  }

  Verdict explore() {
    std::vector<SymState> stack;
    stack.push_back(SymState{});

    while (!stack.empty()) {
      if (budget_exhausted()) {
        Verdict v;
        v.safe = true;
        v.bounded = true;
        v.stats = stats_;
        return v;
      }
      SymState st = std::move(stack.back());
      stack.pop_back();

      bool path_alive = true;
      while (path_alive) {
        const ir::Instr& in = instrs_[st.pc];
        switch (in.kind) {
          case ir::InstrKind::Assign: {
            ++stats_.stmts_executed;
            ++st.depth;
            bv::ExprRef rhs = rename(st, in.expr);
            unsigned ver = fresh_version(st, in.lhs);
            if (rhs->is_const()) {
              const_store_[{in.lhs, ver}] = rhs->value;
              st.chain = add_constraint(
                  st.chain, bv::eq(bv::var(in.lhs, ver, in.width), rhs), true);
            } else {
              st.chain = add_constraint(
                  st.chain, bv::eq(bv::var(in.lhs, ver, in.width), rhs), false);
            }
            ++st.pc;
            break;
          }
          case ir::InstrKind::Havoc: {
            ++stats_.stmts_executed;
            ++st.depth;
            unsigned ver = havoc_version(st, in.lhs);
            st.chain = add_havoc(st.chain, in.lhs, ver, in.width, in.cycle);
            ++st.pc;
            break;
          }
          case ir::InstrKind::Assume: {
            ++stats_.stmts_executed;
            ++st.depth;
            bv::ExprRef c = rename(st, in.expr);
            if (c->is_const() && c->value == 1) {
              ++st.pc;
              break;
            }
            if (config_.prune) {
              if (!is_feasible(st.chain, c)) {
                ++stats_.pruned;
                path_alive = false;
                break;
              }
            }
            st.chain = add_constraint(st.chain, c, false);
            ++st.pc;
            break;
          }
          case ir::InstrKind::Assert: {
            ++stats_.stmts_executed;
            ++st.depth;
            bv::ExprRef c = rename(st, in.expr);
            bv::ExprRef nc = bv::lnot(c);
            bool violated;
            if (nc->is_const()) {
              // passing assert needs no solver call; a failing one still
              // needs a model for the counterexample
              violated = nc->value == 1;
              if (violated) {
                std::vector<sat::Lit> assumptions = prepare(st.chain);
                if (timed_solve(assumptions) != sat::Status::Sat)
                  violated = false;  // path condition itself infeasible
              }
            } else {
              violated = is_feasible(st.chain, nc);
            }
            if (violated) {
              Verdict v;
              v.safe = false;
              // re-solve already happened; model is current
              v.trace = build_trace(st.chain, in.label, in.cycle);
              v.stats = stats_;
              return v;
            }
            if (!c->is_const()) st.chain = add_constraint(st.chain, c, false);
            ++st.pc;
            break;
          }
          case ir::InstrKind::Branch: {
            ++stats_.stmts_executed;
            ++st.depth;
            bv::ExprRef c = rename(st, in.expr);
            bv::ExprRef nc = bv::lnot(c);

            auto direction = [&](const bv::ExprRef& cond) -> int {
              // 1 feasible, 0 pruned
              if (!config_.prune) return 1;
              if (cond->is_const()) return cond->value ? 1 : 0;
              return is_feasible(st.chain, cond) ? 1 : 0;
            };
            int take_then = direction(c);
            int take_else = direction(nc);
            if (!take_then) ++stats_.pruned;
            if (!take_else) ++stats_.pruned;

            // LIFO worklist: push the else side first so the then branch
            // is explored first
            if (take_else) {
              SymState child = st;
              child.pc = in.target;
              if (!(nc->is_const() && nc->value == 1))
                child.chain = add_constraint(child.chain, nc, false);
              stack.push_back(std::move(child));
            }
            if (take_then) {
              st.pc = st.pc + 1;
              if (!(c->is_const() && c->value == 1))
                st.chain = add_constraint(st.chain, c, false);
            } else {
              path_alive = false;
            }
            break;
          }
          case ir::InstrKind::Goto:
            st.pc = in.target;
            break;
          case ir::InstrKind::StepMark:
            ++st.pc;
            break;
          case ir::InstrKind::End:
            ++stats_.completed_paths;
            if (config_.path_log) {
              std::vector<bv::ExprRef> conds;
              for (const SegNode* n = st.chain.get(); n; n = n->parent.get())
                if (n->constraint) conds.push_back(n->constraint);
              std::reverse(conds.begin(), conds.end());
              config_.path_log->push_back(std::move(conds));
            }
            path_alive = false;
            break;
        }
      }
    }

    Verdict v;
    v.safe = true;
    v.stats = stats_;
    return v;
  }
};

}  // namespace

Verdict run(const ir::Program& program, const Config& config) {
  if (!program.acyclic())
    throw Error("symbolic execution requires an unwound (acyclic) program");
  Engine e(program, config);
  return e.run();
}

}  // namespace coverif::symex
