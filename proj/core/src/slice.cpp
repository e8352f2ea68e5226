// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "coverif/slice.hpp"

#include <functional>
#include <set>

namespace coverif::slice {

namespace {

void expr_vars(const bv::ExprRef& e, std::set<std::string>& out) {
  if (!e) return;
  std::vector<const bv::Expr*> vars;
  bv::collect_vars(e, vars);
  for (const auto* v : vars) out.insert(v->name);
}

// one relevance pass; returns true when the relevant-variable set grew
bool mark_pass(const std::vector<ir::StmtPtr>& stmts, std::set<std::string>& rel) {
  bool grew = false;
  auto add_vars = [&](const bv::ExprRef& e) {
    std::set<std::string> vs;
    expr_vars(e, vs);
    for (const auto& v : vs) grew |= rel.insert(v).second;
  };

  // a branch is relevant when anything under it is; walk bottom-up
  std::function<bool(const std::vector<ir::StmtPtr>&)> walk =
      [&](const std::vector<ir::StmtPtr>& list) -> bool {
    bool any_relevant = false;
    for (const auto& s : list) {
      switch (s->kind) {
        case ir::StmtKind::Assert:
          add_vars(s->expr);
          any_relevant = true;
          break;
        case ir::StmtKind::Assign:
          if (rel.contains(s->lhs)) {
            add_vars(s->expr);
            any_relevant = true;
          }
          break;
        case ir::StmtKind::Havoc:
          if (rel.contains(s->lhs)) any_relevant = true;
          break;
        case ir::StmtKind::Assume: {
          std::set<std::string> vs;
          expr_vars(s->expr, vs);
          bool touches = vs.empty();  // constant assumes always stay
          for (const auto& v : vs)
            if (rel.contains(v)) touches = true;
          if (touches) {
            add_vars(s->expr);
            any_relevant = true;
          }
          break;
        }
        case ir::StmtKind::If: {
          bool inner = walk(s->then_stmts);
          inner |= walk(s->else_stmts);
          if (inner) {
            add_vars(s->expr);  // control dependence
            any_relevant = true;
          }
          break;
        }
        case ir::StmtKind::StepMark:
          break;
        case ir::StmtKind::Loop:
          throw Error("slicing requires an unwound (acyclic) program");
      }
    }
    return any_relevant;
  };
  walk(stmts);
  return grew;
}

std::vector<ir::StmtPtr> rebuild(const std::vector<ir::StmtPtr>& stmts,
                                 const std::set<std::string>& rel, size_t& kept) {
  std::vector<ir::StmtPtr> out;
  for (const auto& s : stmts) {
    switch (s->kind) {
      case ir::StmtKind::Assert:
        out.push_back(s);
        ++kept;
        break;
      case ir::StmtKind::Assign:
      case ir::StmtKind::Havoc:
        if (rel.contains(s->lhs)) {
          out.push_back(s);
          ++kept;
        }
        break;
      case ir::StmtKind::Assume: {
        std::set<std::string> vs;
        expr_vars(s->expr, vs);
        bool touches = vs.empty();
        for (const auto& v : vs)
          if (rel.contains(v)) touches = true;
        if (touches) {
          out.push_back(s);
          ++kept;
        }
        break;
      }
      case ir::StmtKind::If: {
        size_t inner_kept = 0;
        auto t = rebuild(s->then_stmts, rel, inner_kept);
        auto e = rebuild(s->else_stmts, rel, inner_kept);
        if (inner_kept > 0) {
          auto c = std::make_shared<ir::Stmt>(*s);
          c->then_stmts = std::move(t);
          c->else_stmts = std::move(e);
          out.push_back(c);
          kept += inner_kept + 1;
        }
        break;
      }
      case ir::StmtKind::StepMark:
        out.push_back(s);  // cycle accounting, no semantics
        break;
      default:
        break;
    }
  }
  return out;
}

}  // namespace

SliceResult slice(const ir::Program& program) {
  if (!program.acyclic())
    throw Error("slicing requires an unwound (acyclic) program");
  SliceResult r;
  r.original = program.stmt_count();
  if (program.assert_labels().empty()) {
    r.program = program;
    r.warned_no_asserts = true;
    r.kept = r.original;
    return r;
  }

  std::set<std::string> rel;
  // seed with assertion variables, then close backward over data, control
  // and assume dependences
  while (mark_pass(program.stmts, rel)) {
  }

  r.program.var_widths = program.var_widths;
  size_t kept = 0;
  r.program.stmts = rebuild(program.stmts, rel, kept);
  r.kept = r.program.stmt_count();
  return r;
}

}  // namespace coverif::slice
