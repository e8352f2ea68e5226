// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "coverif/unwind.hpp"

#include <algorithm>

namespace coverif::harness {

namespace {

constexpr uint64_t kNestedUnrollCap = 4096;

bool has_assert(const std::vector<ir::StmtPtr>& stmts) {
  for (const auto& s : stmts) {
    switch (s->kind) {
      case ir::StmtKind::Assert:
        return true;
      case ir::StmtKind::If:
        if (has_assert(s->then_stmts) || has_assert(s->else_stmts)) return true;
        break;
      case ir::StmtKind::Loop:
        if (has_assert(s->body)) return true;
        break;
      default:
        break;
    }
  }
  return false;
}

class Unwinder {
 public:
  Unwinder(unsigned k, std::vector<std::string>* warnings)
      : k_(k), warnings_(warnings) {}

  std::vector<ir::StmtPtr> top(const std::vector<ir::StmtPtr>& stmts,
                               const ir::Program& p) {
    widths_ = &p.var_widths;
    std::vector<ir::StmtPtr> out;
    expand(stmts, false, out);
    return out;
  }

 private:
  unsigned k_;
  std::vector<std::string>* warnings_;
  const std::map<std::string, unsigned>* widths_ = nullptr;

  void warn(const std::string& msg) {
    if (warnings_) warnings_->push_back(msg);
  }

  void expand(const std::vector<ir::StmtPtr>& stmts, bool in_loop,
              std::vector<ir::StmtPtr>& out) {
    for (const auto& s : stmts) expand_stmt(s, in_loop, out);
  }

  void expand_stmt(const ir::StmtPtr& s, bool in_loop, std::vector<ir::StmtPtr>& out) {
    switch (s->kind) {
      case ir::StmtKind::If: {
        std::vector<ir::StmtPtr> t, e;
        expand(s->then_stmts, in_loop, t);
        expand(s->else_stmts, in_loop, e);
        out.push_back(ir::mk_if(s->expr, std::move(t), std::move(e)));
        break;
      }
      case ir::StmtKind::Loop:
        expand_loop(s, in_loop, out);
        break;
      default:
        out.push_back(s);
        break;
    }
  }

  void expand_loop(const ir::StmtPtr& s, bool in_loop, std::vector<ir::StmtPtr>& out) {
    const ir::LoopInfo& li = s->loop;

    if (li.counted) {
      uint64_t copies = li.trip;
      if (!in_loop) copies = std::min<uint64_t>(copies, k_);
      else if (copies > kNestedUnrollCap)
        throw Error("nested loop exceeds the unrolling limit of " +
                    std::to_string(kNestedUnrollCap) + " iterations");
      if (!in_loop && k_ == 0 && has_assert(s->body))
        warn("unwind bound 0: assertions inside the harness loop are not checked");
      unsigned w = widths_->at(li.var);
      uint64_t v = li.init;
      for (uint64_t i = 0; i < copies; ++i) {
        out.push_back(ir::mk_assign(li.var, w, bv::constant(v & bv::width_mask(w), w)));
        expand(s->body, true, out);
        v = (v + li.step_add) & bv::width_mask(w);
      }
      // exit value of the counter, read by any code after the loop
      out.push_back(ir::mk_assign(li.var, w, bv::constant(v & bv::width_mask(w), w)));
      return;
    }

    if (in_loop)
      throw Error("nested loop with a non-constant bound cannot be unwound");
    if (k_ == 0) {
      if (has_assert(s->body))
        warn("unwind bound 0: assertions inside the harness loop are not checked");
      return;
    }

    bool always_true = s->expr->is_const() && s->expr->value == 1;
    if (always_true) {
      for (unsigned i = 0; i < k_; ++i) expand(s->body, true, out);
      return;
    }
    // nested guarded copies: once the guard fails the loop stays exited
    std::vector<ir::StmtPtr> inner;
    for (unsigned i = 0; i < k_; ++i) {
      std::vector<ir::StmtPtr> body;
      expand(s->body, true, body);
      for (auto& st : inner) body.push_back(st);
      inner.clear();
      inner.push_back(ir::mk_if(s->expr, std::move(body), {}));
    }
    for (auto& st : inner) out.push_back(st);
  }
};

// deep clone with cycle tags; the step-mark counter advances after tagging
struct Tagger {
  int cycle = 0;

  std::vector<ir::StmtPtr> run(const std::vector<ir::StmtPtr>& stmts) {
    std::vector<ir::StmtPtr> out;
    for (const auto& s : stmts) out.push_back(tag(s));
    return out;
  }

  ir::StmtPtr tag(const ir::StmtPtr& s) {
    auto c = std::make_shared<ir::Stmt>(*s);
    c->cycle = cycle;
    if (s->kind == ir::StmtKind::If) {
      c->then_stmts = run(s->then_stmts);
      c->else_stmts = run(s->else_stmts);
    }
    if (s->kind == ir::StmtKind::StepMark) ++cycle;
    return c;
  }
};

}  // namespace

ir::Program unwind(const ir::Program& p, unsigned k,
                   std::vector<std::string>* warnings) {
  Unwinder u(k, warnings);
  ir::Program out;
  out.var_widths = p.var_widths;
  auto expanded = u.top(p.stmts, p);
  Tagger t;
  out.stmts = t.run(expanded);
  return out;
}

}  // namespace coverif::harness
