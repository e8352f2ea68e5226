// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstdio>

#include "coverif/bmc.hpp"
#include "coverif/enumerate.hpp"
#include "coverif/sim.hpp"
#include "coverif/symex.hpp"
#include "coverif/unwind.hpp"
#include "coverif/verify.hpp"
#include "test_util.hpp"

using namespace coverif;

namespace {

harness::ComposedModel fragment_model(const std::string& tail) {
  std::string fw_text =
      "u8 reset; u8 c; u8 d; u8 m; u8 t;\n"
      "reset = nondet(8); c = nondet(8); d = nondet(8);\n"
      "if (reset != 0) {\n"
      "  m = 0;\n"
      "  t = 0;\n"
      "} else {\n"
      "  if (c > d) {\n"
      "    m = c + d;\n"
      "  } else {\n"
      "    t = (c & 3) << d;\n"
      "  }\n"
      "}\n" +
      tail;
  return load_model_text("module shell(); endmodule", "shell", fw_text);
}

}  // namespace

TEST_CASE("guarded SSA of the fragment matches the monolithic shape") {
  ir::Program p = testutil::mt_fragment(
      bv::ule(bv::var("m", 0, 8), bv::constant(255, 8)), "t");
  bmc::SsaProgram ssa = bmc::encode_ssa(p);

  CHECK(ssa.guard_count == 2);

  // ite merges exist for both m and t
  size_t m_merges = 0, t_merges = 0, equalities = 0;
  for (const auto& eq : ssa.equalities) {
    if (eq.rhs->op == bv::Op::Ite && !eq.is_guard) {
      if (eq.name == "m") ++m_merges;
      if (eq.name == "t") ++t_merges;
    }
    ++equalities;
  }
  CHECK(m_merges >= 1);
  CHECK(t_merges >= 1);
  CHECK(ssa.merge_count == m_merges + t_merges);

  // linear in the program: two guards, four branch-side assignments and
  // the merges stay within the paper's budget
  CHECK(equalities <= 12);
  CHECK(ssa.obligations.size() == 1);
  CHECK(ssa.havocs.size() == 3);
}

TEST_CASE("straight-line programs encode without guards") {
  auto model = load_model_text("module shell(); endmodule", "shell",
                               "u8 a; u8 b;\n"
                               "a = nondet(8); b = a + 1;\n"
                               "assert(b != a, \"differs\");");
  ir::Program p = harness::unwind(model.program, 1);
  bmc::SsaProgram ssa = bmc::encode_ssa(p);
  CHECK(ssa.guard_count == 0);
  for (const auto& eq : ssa.equalities) CHECK_FALSE(eq.is_guard);
}

TEST_CASE("merges only cover variables written in a branch") {
  auto model = load_model_text("module shell(); endmodule", "shell",
                               "u8 x; u8 m; u8 t; x = nondet(8); m = 0; t = 0;\n"
                               "if (x > 4) { m = 1; }\n"
                               "assert(t == 0, \"t_untouched\");");
  ir::Program p = harness::unwind(model.program, 1);
  bmc::SsaProgram ssa = bmc::encode_ssa(p);
  size_t t_defs_after_guard = 0;
  bool seen_guard = false;
  for (const auto& eq : ssa.equalities) {
    if (eq.is_guard) seen_guard = true;
    else if (seen_guard && eq.name == "t") ++t_defs_after_guard;
  }
  CHECK(ssa.merge_count == 1);
  CHECK(t_defs_after_guard == 0);
}

TEST_CASE("unsigned non-negativity is safe in one call") {
  auto model = fragment_model("assert(m >= 0, \"unsigned\");\n");
  ir::Program p = harness::unwind(model.program, 1);
  bmc::SsaProgram ssa = bmc::encode_ssa(p);
  Verdict v = bmc::check(ssa);
  CHECK(v.safe);
  CHECK(v.stats.solver_calls == 1);
}

TEST_CASE("fragment claim checked against brute force") {
  // t <= (c & 3) << d does not hold on the reset path when t keeps its
  // havocked initial... it does: both engines and enumeration must agree
  std::string claim = "assert(t <= 48, \"t_bound\");\n";
  auto model = fragment_model(claim);
  ir::Program p = harness::unwind(model.program, 1);

  Verdict mono = bmc::check(bmc::encode_ssa(p));
  symex::Config cfg;
  Verdict sym = symex::run(p, cfg);

  // brute force over 8-bit c, d and the reset flag (sampled exhaustively on
  // the decision-relevant bits)
  bool violated = false;
  for (unsigned reset = 0; reset < 2 && !violated; ++reset)
    for (unsigned c = 0; c < 256 && !violated; ++c)
      for (unsigned d = 0; d < 256 && !violated; ++d) {
        unsigned m = 0, t = 0;
        if (reset) {
          m = 0;
          t = 0;
        } else if (c > d) {
          m = (c + d) & 0xff;
        } else {
          t = d >= 8 ? 0 : ((c & 3) << d) & 0xff;
        }
        (void)m;
        if (!(t <= 48)) violated = true;
      }
  CHECK(mono.safe == !violated);
  CHECK(sym.safe == !violated);
}

TEST_CASE("uart bug verdicts agree between engines and replay") {
  auto model = testutil::load_bundled("mini_uart_bug_strobe.v", "mini_uart_bug_strobe",
                                      "uart_loopback.fw");
  ir::Program p = harness::unwind(model.program, 8);

  Verdict mono = bmc::check(bmc::encode_ssa(p));
  symex::Config cfg;
  Verdict sym = symex::run(p, cfg);
  REQUIRE_FALSE(mono.safe);
  REQUIRE_FALSE(sym.safe);

  for (const Verdict* v : {&mono, &sym}) {
    sim::TraceSource src(*v->trace);
    sim::SimOptions opts;
    opts.hw = &model.hw;
    auto replay = sim::simulate(p, src, opts);
    REQUIRE(replay.violated.has_value());
    CHECK(*replay.violated == v->trace->violated_assert);
  }
}

TEST_CASE("formula size is linear across the bundled benchmarks") {
  for (const auto& b : testutil::benchmarks()) {
    auto model = testutil::load_bundled(b.design, b.top, b.fw);
    for (unsigned k : {1u, 2u, 4u}) {
      ir::Program p = harness::unwind(model.program, k);
      bmc::SsaProgram ssa = bmc::encode_ssa(p);
      size_t stmts = p.stmt_count();
      INFO(b.name, " at bound ", k);
      CHECK(ssa.equalities.size() <= 4 * stmts + 8);
    }
  }
}

TEST_CASE("SAT models assign every havoc and replay strictly") {
  auto model = testutil::load_bundled("mini_uart_bug_index.v", "mini_uart_bug_index",
                                      "uart_loopback.fw");
  ir::Program p = harness::unwind(model.program, 8);
  Verdict v = bmc::check(bmc::encode_ssa(p));
  REQUIRE_FALSE(v.safe);

  // strict replay: every havoc of the program must be covered by the trace
  sim::TraceSource src(*v.trace);
  sim::SimOptions opts;
  opts.strict = true;
  opts.hw = &model.hw;
  auto replay = sim::simulate(p, src, opts);
  CHECK(replay.violated.has_value());
  CHECK(replay.defaulted == 0);
}

TEST_CASE("dimacs dump of the monolithic formula") {
  auto model = fragment_model("assert(m <= 255, \"t\");\n");
  ir::Program p = harness::unwind(model.program, 1);
  bmc::CheckOptions opts;
  opts.dump_dimacs_path = "bmc_test.cnf";
  Verdict v = bmc::check(bmc::encode_ssa(p), opts);
  CHECK(v.safe);
  std::string text = testutil::read_file("bmc_test.cnf");
  CHECK(text.rfind("p cnf ", 0) == 0);
  std::remove("bmc_test.cnf");
}
