// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "coverif/slice.hpp"
#include "coverif/symex.hpp"
#include "coverif/unwind.hpp"
#include "coverif/verify.hpp"
#include "test_util.hpp"

using namespace coverif;

namespace {

// the reset/m/t fragment with an assertion over m only
ir::Program mt_fragment() {
  using namespace bv;
  ir::Program p;
  p.var_widths = {{"reset", 8}, {"c", 8}, {"d", 8}, {"m", 8}, {"t", 8}};
  auto r = var("reset", 0, 8);
  auto c = var("c", 0, 8);
  auto d = var("d", 0, 8);
  p.stmts = {
      ir::mk_havoc("reset", 8),
      ir::mk_havoc("c", 8),
      ir::mk_havoc("d", 8),
      ir::mk_if(redor(r),
                {ir::mk_assign("m", 8, constant(0, 8)),
                 ir::mk_assign("t", 8, constant(0, 8))},
                {ir::mk_if(ult(d, c), {ir::mk_assign("m", 8, add(c, d))},
                           {ir::mk_assign("t", 8,
                                          shl(bv_and(c, constant(3, 8)), d))})}),
      ir::mk_assert("m_small", ule(var("m", 0, 8), constant(255, 8))),
  };
  return p;
}

size_t count_assigns_to(const std::vector<ir::StmtPtr>& stmts, const std::string& lhs) {
  size_t n = 0;
  for (const auto& s : stmts) {
    if (s->kind == ir::StmtKind::Assign && s->lhs == lhs) ++n;
    if (s->kind == ir::StmtKind::If)
      n += count_assigns_to(s->then_stmts, lhs) + count_assigns_to(s->else_stmts, lhs);
  }
  return n;
}

}  // namespace

TEST_CASE("t-only assignments are sliced away, guarding branches stay") {
  ir::Program p = mt_fragment();
  auto r = slice::slice(p);
  CHECK_FALSE(r.warned_no_asserts);
  CHECK(r.kept < r.original);
  CHECK(count_assigns_to(r.program.stmts, "t") == 0);
  CHECK(count_assigns_to(r.program.stmts, "m") == 2);
  // the branch over reset still guards m
  bool found_branch = false;
  for (const auto& s : r.program.stmts)
    if (s->kind == ir::StmtKind::If) found_branch = true;
  CHECK(found_branch);

  // a slice never changes the verdict
  symex::Config cfg;
  CHECK(symex::run(p, cfg).safe == symex::run(r.program, cfg).safe);
}

TEST_CASE("an assertion over every variable keeps everything") {
  using namespace bv;
  ir::Program p = mt_fragment();
  // replace the assert with one reading every variable
  auto all = land(ule(var("m", 0, 8), constant(255, 8)),
                  land(ult(var("t", 0, 8), constant(255, 8)),
                       land(redor(var("reset", 0, 8)),
                            eq(var("c", 0, 8), var("d", 0, 8)))));
  p.stmts.back() = ir::mk_assert("all", all);
  auto r = slice::slice(p);
  CHECK(r.kept == r.original);
}

TEST_CASE("no assertions: identity with a warning") {
  ir::Program p = mt_fragment();
  p.stmts.pop_back();
  auto r = slice::slice(p);
  CHECK(r.warned_no_asserts);
  CHECK(r.kept == r.original);
}

TEST_CASE("slicing is idempotent and monotone") {
  for (const auto& b : testutil::benchmarks()) {
    auto model = testutil::load_bundled(b.design, b.top, b.fw);
    ir::Program p = harness::unwind(model.program, 3);
    auto s1 = slice::slice(p);
    CHECK(s1.kept <= s1.original);
    auto s2 = slice::slice(s1.program);
    CHECK(s2.kept == s1.kept);
    CHECK(ir::to_string(s2.program) == ir::to_string(s1.program));
  }
}

TEST_CASE("assume statements touching relevant variables stay") {
  using namespace bv;
  ir::Program p;
  p.var_widths = {{"x", 4}, {"y", 4}, {"z", 4}};
  p.stmts = {
      ir::mk_havoc("x", 4),
      ir::mk_havoc("z", 4),
      ir::mk_assume(eq(var("x", 0, 4), constant(1, 4))),
      ir::mk_assume(ult(var("z", 0, 4), constant(2, 4))),  // irrelevant
      ir::mk_assign("y", 4, var("x", 0, 4)),
      ir::mk_assert("y_one", eq(var("y", 0, 4), constant(1, 4))),
  };
  auto r = slice::slice(p);
  size_t assumes = 0;
  for (const auto& s : r.program.stmts)
    if (s->kind == ir::StmtKind::Assume) ++assumes;
  CHECK(assumes == 1);  // the x assume stays, the z assume goes
  // dropping the x assume would have flipped this verdict
  symex::Config cfg;
  CHECK(symex::run(r.program, cfg).safe);
}

TEST_CASE("slicing soundness across engines on the bundled benchmarks") {
  for (const auto& b : testutil::benchmarks()) {
    auto model = testutil::load_bundled(b.design, b.top, b.fw);
    for (EngineKind engine : {EngineKind::Symex, EngineKind::Mono}) {
      VerifyOptions on, off;
      on.engine = off.engine = engine;
      on.unwind = off.unwind = 3;
      on.slice = true;
      off.slice = false;
      auto von = verify_model(model, on);
      auto voff = verify_model(model, off);
      INFO(b.name);
      CHECK(von.verdict.safe == voff.verdict.safe);
      CHECK(von.sliced_stmts <= von.original_stmts);
    }
  }
}
