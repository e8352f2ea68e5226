// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "coverif/bmc.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <set>

#include "coverif/bitblast.hpp"

namespace coverif::bmc {

namespace {

class SsaBuilder {
 public:
  explicit SsaBuilder(const ir::Program& p) : prog_(p) {}

  SsaProgram run() {
    std::map<std::string, unsigned> versions;
    encode(prog_.stmts, versions, nullptr);
    return std::move(out_);
  }

 private:
  const ir::Program& prog_;
  SsaProgram out_;
  std::map<std::string, unsigned> next_version_;
  std::set<std::string> read_seen_;
  std::map<std::pair<std::string, unsigned>, uint64_t> const_store_;
  unsigned guard_counter_ = 0;

  unsigned width_of(const std::string& name) const {
    auto it = prog_.var_widths.find(name);
    if (it == prog_.var_widths.end())
      throw Error("internal: unknown variable in program: " + name);
    return it->second;
  }

  unsigned current(const std::map<std::string, unsigned>& versions,
                   const std::string& name) const {
    auto it = versions.find(name);
    return it == versions.end() ? 1 : it->second;
  }

  unsigned fresh(std::map<std::string, unsigned>& versions, const std::string& name) {
    auto [it, inserted] = next_version_.try_emplace(name, 1);
    unsigned v = ++it->second;
    versions[name] = v;
    return v;
  }

  // a havoc that is the variable's first event keeps the free version 1
  unsigned fresh_havoc(std::map<std::string, unsigned>& versions,
                       const std::string& name) {
    if (!next_version_.contains(name) && !read_seen_.contains(name)) {
      next_version_[name] = 1;
      versions[name] = 1;
      return 1;
    }
    return fresh(versions, name);
  }

  bv::ExprRef rename(const std::map<std::string, unsigned>& versions,
                     const bv::ExprRef& e) {
    return bv::substitute(e, [&](const bv::Expr& var) -> bv::ExprRef {
      read_seen_.insert(var.name);
      unsigned ver = current(versions, var.name);
      if (auto it = const_store_.find({var.name, ver}); it != const_store_.end())
        return bv::constant(it->second, var.width);
      return bv::var(var.name, ver, var.width);
    });
  }

  void define(std::map<std::string, unsigned>& versions, const std::string& name,
              bv::ExprRef rhs, bool is_guard = false) {
    unsigned ver = fresh(versions, name);
    if (rhs->is_const()) const_store_[{name, ver}] = rhs->value;
    out_.equalities.push_back(SsaProgram::Equality{name, ver, std::move(rhs), is_guard});
  }

  static void collect_writes(const std::vector<ir::StmtPtr>& stmts,
                             std::set<std::string>& out) {
    for (const auto& s : stmts) {
      switch (s->kind) {
        case ir::StmtKind::Assign:
        case ir::StmtKind::Havoc:
          out.insert(s->lhs);
          break;
        case ir::StmtKind::If:
          collect_writes(s->then_stmts, out);
          collect_writes(s->else_stmts, out);
          break;
        default:
          break;
      }
    }
  }

  void encode(const std::vector<ir::StmtPtr>& stmts,
              std::map<std::string, unsigned>& versions, const bv::ExprRef* guard_ctx) {
    for (const auto& s : stmts) {
      switch (s->kind) {
        case ir::StmtKind::Assign:
          define(versions, s->lhs, rename(versions, s->expr));
          break;
        case ir::StmtKind::Havoc: {
          unsigned ver = fresh_havoc(versions, s->lhs);
          out_.havocs.push_back(SsaProgram::HavocVar{s->lhs, ver, s->width, s->cycle});
          break;
        }
        case ir::StmtKind::Assume: {
          bv::ExprRef c = rename(versions, s->expr);
          if (guard_ctx) c = bv::lor(bv::lnot(*guard_ctx), c);
          out_.assumes.push_back(std::move(c));
          break;
        }
        case ir::StmtKind::Assert: {
          bv::ExprRef ctx = guard_ctx ? *guard_ctx : bv::bv_true();
          out_.obligations.push_back(
              SsaProgram::Obligation{s->label, ctx, rename(versions, s->expr), s->cycle});
          break;
        }
        case ir::StmtKind::StepMark:
          break;
        case ir::StmtKind::If: {
          bv::ExprRef cond = rename(versions, s->expr);
          if (cond->is_const()) {
            // branch statically resolved; no guard or merges needed
            encode(cond->value ? s->then_stmts : s->else_stmts, versions, guard_ctx);
            break;
          }
          ++guard_counter_;
          ++out_.guard_count;
          std::string gname = "guard";
          define(versions, gname, cond, true);
          bv::ExprRef g = bv::var(gname, current(versions, gname), 1);

          bv::ExprRef then_ctx = guard_ctx ? bv::land(*guard_ctx, g) : g;
          bv::ExprRef else_ctx =
              guard_ctx ? bv::land(*guard_ctx, bv::lnot(g)) : bv::lnot(g);

          auto then_versions = versions;
          auto else_versions = versions;
          encode(s->then_stmts, then_versions, &then_ctx);
          encode(s->else_stmts, else_versions, &else_ctx);

          // ite merges for every variable assigned in either side
          std::set<std::string> written;
          collect_writes(s->then_stmts, written);
          collect_writes(s->else_stmts, written);
          for (const auto& name : written) {
            unsigned w = width_of(name);
            auto read = [&](const std::map<std::string, unsigned>& vs) -> bv::ExprRef {
              unsigned ver = current(vs, name);
              if (auto it = const_store_.find({name, ver}); it != const_store_.end())
                return bv::constant(it->second, w);
              return bv::var(name, ver, w);
            };
            bv::ExprRef tv = read(then_versions);
            bv::ExprRef ev = read(else_versions);
            define(versions, name, bv::ite(g, tv, ev));
            ++out_.merge_count;
          }
          break;
        }
        case ir::StmtKind::Loop:
          throw Error("monolithic encoding requires an unwound (acyclic) program");
      }
    }
  }
};

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

SsaProgram encode_ssa(const ir::Program& program) {
  if (!program.acyclic())
    throw Error("monolithic encoding requires an unwound (acyclic) program");
  return SsaBuilder(program).run();
}

Verdict check(const SsaProgram& ssa, const CheckOptions& opts) {
  auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  v.stats.formula_equalities = ssa.equalities.size();
  v.stats.solver_instances = 1;

  blast::CnfInstance instance;
  for (const auto& eq : ssa.equalities) {
    bv::ExprRef lhs = bv::var(eq.name, eq.version, eq.rhs->width);
    instance.assert_true(bv::eq(lhs, eq.rhs));
  }
  for (const auto& a : ssa.assumes) instance.assert_true(a);
  for (const auto& h : ssa.havocs) instance.touch_var(h.name, h.version, h.width);

  // one formula: equalities /\ assumes /\ (sel_1 \/ ... \/ sel_n),
  // sel_i => (guard_i /\ !cond_i)
  std::vector<sat::Lit> selectors;
  for (const auto& ob : ssa.obligations) {
    bv::ExprRef violated = bv::land(ob.guard_ctx, bv::lnot(ob.cond));
    sat::Lit sel = instance.fresh_lit();
    instance.assert_implies(sel, violated);
    selectors.push_back(sel);
  }
  if (selectors.empty()) {
    v.safe = true;
    v.stats.total_time_ms = ms_since(t0);
    return v;
  }
  instance.solver().add_clause(selectors);

  if (!opts.dump_dimacs_path.empty()) {
    std::ofstream os(opts.dump_dimacs_path);
    if (!os) throw Error("cannot write " + opts.dump_dimacs_path);
    instance.write_dimacs(os);
  }

  auto ts = std::chrono::steady_clock::now();
  sat::Status st = instance.solve();
  v.stats.solver_calls = 1;
  v.stats.solve_time_ms = ms_since(ts);

  if (st == sat::Status::Unsat) {
    v.safe = true;
    v.stats.total_time_ms = ms_since(t0);
    return v;
  }

  v.safe = false;
  Trace t;
  // The failing assertion reported is the first one violated in program
  // order under this model, so a concrete replay of the trace stops at
  // exactly this label.
  bv::Env env;
  for (const auto& [name, ver, value] : instance.model_vars()) env.set(name, ver, value);
  for (const auto& ob : ssa.obligations) {
    bv::ExprRef violated = bv::land(ob.guard_ctx, bv::lnot(ob.cond));
    if (bv::eval(violated, env)) {
      t.violated_assert = ob.label;
      t.violation_cycle = ob.cycle;
      break;
    }
  }
  if (t.violated_assert.empty())
    throw Error("internal: SAT model does not violate any obligation");
  for (const auto& h : ssa.havocs) {
    TraceHavoc th;
    th.cycle = h.cycle < 0 ? 0 : h.cycle;
    th.name = h.name;
    th.version = h.version;
    th.value = instance.model_value(h.name, h.version, h.width);
    t.havocs.push_back(std::move(th));
  }
  for (const auto& [name, ver, value] : instance.model_vars())
    t.model.emplace_back(name + "_" + std::to_string(ver), value);
  v.trace = std::move(t);
  v.stats.total_time_ms = ms_since(t0);
  return v;
}

}  // namespace coverif::bmc
