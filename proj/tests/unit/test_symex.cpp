// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "coverif/sim.hpp"
#include "coverif/symex.hpp"
#include "coverif/unwind.hpp"
#include "coverif/verify.hpp"
#include "test_util.hpp"

using namespace coverif;

namespace {

ir::Program fragment_program() {
  return testutil::mt_fragment(
      bv::ule(bv::var("m", 0, 8), bv::constant(255, 8)), "trivially_true");
}

}  // namespace

TEST_CASE("all three fragment paths are feasible") {
  ir::Program p = fragment_program();
  symex::Config cfg;
  Verdict v = symex::run(p, cfg);
  CHECK(v.safe);
  CHECK(v.stats.completed_paths == 3);
  CHECK(v.stats.pruned == 0);
  CHECK(v.stats.branch_attempts == 3);
}

TEST_CASE("assert(false) is unsafe with an empty-input trace") {
  auto model = load_model_text("module shell(); endmodule", "shell",
                               "assert(1 == 0, \"never\");");
  ir::Program p = harness::unwind(model.program, 1);
  symex::Config cfg;
  Verdict v = symex::run(p, cfg);
  REQUIRE_FALSE(v.safe);
  CHECK(v.trace->violated_assert == "never");
  CHECK(v.trace->havocs.empty());
}

TEST_CASE("fragment path conditions match the paper constraints") {
  ir::Program p = fragment_program();

  std::vector<std::vector<bv::ExprRef>> log;
  symex::Config cfg;
  cfg.path_log = &log;
  Verdict v = symex::run(p, cfg);
  REQUIRE(v.safe);
  REQUIRE(log.size() == 3);

  // drop the trivially-true assert conjunct bookkeeping: collect the
  // (name, version) pairs constrained along each path
  auto vars_of = [](const std::vector<bv::ExprRef>& conds) {
    std::set<std::pair<std::string, unsigned>> out;
    for (const auto& c : conds) {
      std::vector<const bv::Expr*> vs;
      bv::collect_vars(c, vs);
      for (const auto* ve : vs) out.emplace(ve->name, ve->version);
    }
    return out;
  };

  // C1: reset_1 != 0, m_2 = 0, t_2 = 0 (then branch first)
  auto c1 = vars_of(log[0]);
  CHECK(c1.contains({"reset", 1}));
  CHECK(c1.contains({"m", 2}));
  CHECK(c1.contains({"t", 2}));

  // C2: reset_1 = 0, d_1 < c_1, m_3 = c_1 + d_1
  auto c2 = vars_of(log[1]);
  CHECK(c2.contains({"reset", 1}));
  CHECK(c2.contains({"c", 1}));
  CHECK(c2.contains({"d", 1}));
  CHECK(c2.contains({"m", 3}));
  CHECK_FALSE(c2.contains({"t", 3}));

  // C3: reset_1 = 0, !(d_1 < c_1), t_3 = (c_1 & 3) << d_1
  auto c3 = vars_of(log[2]);
  CHECK(c3.contains({"t", 3}));
  CHECK_FALSE(c3.contains({"m", 3}));

  // semantic check of the C3 defining constraint against the paper form
  bool found = false;
  for (const auto& c : log[2]) {
    std::vector<const bv::Expr*> vs;
    bv::collect_vars(c, vs);
    bool has_t = false;
    for (const auto* ve : vs)
      if (ve->name == "t") has_t = true;
    if (!has_t) continue;
    found = true;
    std::mt19937_64 rng(7);
    for (int k = 0; k < 300; ++k) {
      uint64_t cv = rng() & 0xff, dv = rng() & 0xff, tv = rng() & 0xff;
      bv::Env env;
      env.set("c", 1, cv);
      env.set("d", 1, dv);
      env.set("t", 3, tv);
      uint64_t shifted = dv >= 8 ? 0 : ((cv & 3) << dv) & 0xff;
      uint64_t want = tv == shifted ? 1 : 0;
      CHECK(bv::eval(c, env) == want);
    }
  }
  CHECK(found);
}

TEST_CASE("feasibility prunes contradictions eagerly") {
  // assume(reset != 0) followed by the reset == 0 branch: the then side is
  // never explored
  auto model = load_model_text(
      "module shell(); endmodule", "shell",
      "u8 reset; reset = nondet(8);\n"
      "assume(reset != 0);\n"
      "u8 m; m = 1;\n"
      "if (reset == 0) { m = 0; }\n"
      "assert(m == 1, \"m_untouched\");");
  ir::Program p = harness::unwind(model.program, 1);
  symex::Config cfg;
  Verdict v = symex::run(p, cfg);
  CHECK(v.safe);
  CHECK(v.stats.pruned == 1);
  CHECK(v.stats.completed_paths == 1);
}

TEST_CASE("feasible branch over parity") {
  auto model = load_model_text("module shell(); endmodule", "shell",
                               "u8 x; x = nondet(8); assume(x == 5);\n"
                               "u1 odd; odd = 0;\n"
                               "if ((x & 1) == 1) { odd = 1; }\n"
                               "assert(odd == 1, \"five_is_odd\");");
  ir::Program p = harness::unwind(model.program, 1);
  symex::Config cfg;
  Verdict v = symex::run(p, cfg);
  CHECK(v.safe);
}

TEST_CASE("injected off-by-one bug is found and replays") {
  auto model = testutil::load_bundled("mini_uart_bug_index.v", "mini_uart_bug_index",
                                      "uart_loopback.fw");
  VerifyOptions opts;
  opts.unwind = 8;
  auto res = verify_model(model, opts);
  REQUIRE_FALSE(res.verdict.safe);
  // exhaustive enumeration agrees at the 4-bit data width
  VerifyOptions eopts;
  eopts.engine = EngineKind::Enumerate;
  eopts.unwind = 8;
  CHECK_FALSE(verify_model(model, eopts).verdict.safe);

  // the trace replays to the same assertion
  sim::TraceSource src(*res.verdict.trace);
  sim::SimOptions sopts;
  sopts.hw = &model.hw;
  auto replay = sim::simulate(res.unwound, src, sopts);
  REQUIRE(replay.violated.has_value());
  CHECK(*replay.violated == res.verdict.trace->violated_assert);
}

TEST_CASE("partial mode rebuilds instances, full mode keeps one") {
  ir::Program p = fragment_program();

  symex::Config pi;
  pi.mode = symex::Mode::PartialIncremental;
  Verdict vpi = symex::run(p, pi);
  CHECK(vpi.stats.solver_instances >= 2);

  symex::Config fi;
  fi.mode = symex::Mode::FullIncremental;
  Verdict vfi = symex::run(p, fi);
  CHECK(vfi.stats.solver_instances == 1);

  CHECK(vpi.safe == vfi.safe);
  CHECK(vpi.stats.completed_paths == vfi.stats.completed_paths);
}

TEST_CASE("single-path programs keep one live instance in partial mode") {
  auto model = load_model_text("module shell(); endmodule", "shell",
                               "u8 x; x = nondet(8);\n"
                               "assume(x > 3);\n"
                               "assume(x < 10);\n"
                               "assert(x != 2, \"gap\");");
  ir::Program p = harness::unwind(model.program, 1);
  symex::Config cfg;
  Verdict v = symex::run(p, cfg);
  CHECK(v.safe);
  CHECK(v.stats.solver_instances == 1);
}

TEST_CASE("pruning ablation: infeasible first branch") {
  std::string fw =
      "u4 x; x = nondet(4);\n"
      "assume(x < 3);\n"
      "u8 junk; junk = 0;\n"
      "if (x > 5) {\n"
      "  junk = 1; junk = 2; junk = 3; junk = 4; junk = 5;\n"
      "  assert(junk == 99, \"unreachable\");\n"
      "}\n"
      "assert(x < 3, \"scenario\");";
  auto model = load_model_text("module shell(); endmodule", "shell", fw);
  ir::Program p = harness::unwind(model.program, 1);

  symex::Config on;
  on.prune = true;
  Verdict von = symex::run(p, on);
  CHECK(von.safe);

  symex::Config off;
  off.prune = false;
  Verdict voff = symex::run(p, off);
  CHECK(voff.safe);

  // with pruning the subtree under x > 5 is never entered: exactly the
  // seven statements outside it run
  CHECK(von.stats.stmts_executed == 7);
  CHECK(von.stats.completed_paths == 1);
  CHECK(von.stats.pruned == 1);
  // without pruning the infeasible subtree is walked in full and its
  // unreachable assert reaches the solver
  CHECK(voff.stats.stmts_executed >= von.stats.stmts_executed + 6);
  CHECK(voff.stats.completed_paths == 2);
  CHECK(voff.stats.pruned == 0);
}

TEST_CASE("exploration is deterministic run to run") {
  auto model = testutil::load_bundled("mini_uart.v", "mini_uart", "uart_loopback.fw");
  ir::Program p = harness::unwind(model.program, 6);
  symex::Config cfg;
  Verdict a = symex::run(p, cfg);
  Verdict b = symex::run(p, cfg);
  CHECK(a.safe == b.safe);
  CHECK(a.stats.branch_attempts == b.stats.branch_attempts);
  CHECK(a.stats.pruned == b.stats.pruned);
  CHECK(a.stats.completed_paths == b.stats.completed_paths);
  CHECK(a.stats.solver_calls == b.stats.solver_calls);
  CHECK(a.stats.stmts_executed == b.stats.stmts_executed);
}

TEST_CASE("attempt budget caps the exploration") {
  ir::Program p = fragment_program();
  symex::Config cfg;
  cfg.max_attempts = 1;
  Verdict v = symex::run(p, cfg);
  CHECK(v.bounded);
  CHECK(v.stats.completed_paths <= 2);
}
