// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "coverif/enumerate.hpp"
#include "coverif/refsim.hpp"
#include "coverif/rtl_parse.hpp"
#include "coverif/sim.hpp"
#include "coverif/unwind.hpp"
#include "coverif/verify.hpp"
#include "test_util.hpp"

using namespace coverif;

TEST_CASE("two cycles of the circuit-to-netlist example by hand") {
  // from the zero state with a = 1: after cycle 1 b=1,e=0,d=0; after cycle
  // 2 b=1,e=1,d=0
  auto model = testutil::load_bundled("ex1.v", "top", "ex1_safe.fw");
  ir::Program p = harness::unwind(model.program, 2);
  auto instrs = ir::flatten(p);
  std::map<size_t, uint64_t> values;
  for (size_t i = 0; i < instrs.size(); ++i)
    if (instrs[i].kind == ir::InstrKind::Havoc) values[i] = 1;  // a = 1
  sim::SiteSource src(std::move(values));
  sim::SimOptions opts;
  opts.hw = &model.hw;
  opts.snapshot_vars = {"top.b", "top.d", "top.e"};
  auto r = sim::simulate(p, src, opts);
  REQUIRE(r.snapshots.size() == 2);
  CHECK(r.snapshots[0].at("top.b") == 1);
  CHECK(r.snapshots[0].at("top.e") == 0);
  CHECK(r.snapshots[0].at("top.d") == 0);
  CHECK(r.snapshots[1].at("top.b") == 1);
  CHECK(r.snapshots[1].at("top.e") == 1);
  CHECK(r.snapshots[1].at("top.d") == 0);
}

TEST_CASE("deterministic loopback delivers the transmitted word") {
  auto model = testutil::load_bundled("mini_uart.v", "mini_uart",
                                      "uart_loopback_det.fw");
  ir::Program p = harness::unwind(model.program, 16);
  sim::SiteSource src({});
  sim::SimOptions opts;
  opts.hw = &model.hw;
  auto r = sim::simulate(p, src, opts);
  CHECK_FALSE(r.vacuous);
  CHECK_FALSE(r.violated.has_value());
  CHECK(r.env.get("r", 0) == 9);
  CHECK(r.env.get("got", 0) == 1);
}

TEST_CASE("replaying an engine trace reports the same assertion") {
  auto model = testutil::load_bundled("ex1.v", "top", "ex1_unsafe.fw");
  for (EngineKind e : {EngineKind::Symex, EngineKind::Mono, EngineKind::Enumerate}) {
    VerifyOptions opts;
    opts.engine = e;
    opts.unwind = 3;
    auto res = verify_model(model, opts);
    REQUIRE_FALSE(res.verdict.safe);
    sim::TraceSource src(*res.verdict.trace);
    sim::SimOptions sopts;
    sopts.hw = &model.hw;
    auto replay = sim::simulate(res.unwound, src, sopts);
    REQUIRE(replay.violated.has_value());
    CHECK(*replay.violated == "e_stays_zero");
  }
}

TEST_CASE("false assumptions halt the run as vacuous") {
  auto model = load_model_text("module shell(); endmodule", "shell",
                               "u4 x; x = 3;\n"
                               "assume(x == 5);\n"
                               "assert(1 == 0, \"unreached\");");
  ir::Program p = harness::unwind(model.program, 1);
  sim::SiteSource src({});
  auto r = sim::simulate(p, src, {});
  CHECK(r.vacuous);
  CHECK_FALSE(r.violated.has_value());
}

TEST_CASE("strict replay rejects missing havoc values") {
  auto model = testutil::load_bundled("ex1.v", "top", "ex1_safe.fw");
  ir::Program p = harness::unwind(model.program, 2);
  sim::SiteSource src({});
  sim::SimOptions opts;
  opts.strict = true;
  CHECK_THROWS_WITH_AS(sim::simulate(p, src, opts), doctest::Contains("no value"),
                       coverif::Error);
}

TEST_CASE("composition preserves concrete semantics under pinned schedules") {
  // drive the composed model and the reference simulator with one schedule
  auto design = rtl::elaborate(
      rtl::parse_files({testutil::design_path("mini_uart.v")}), "mini_uart");
  auto hw = synth::synthesize(design);
  auto model = testutil::load_bundled("mini_uart.v", "mini_uart",
                                      "uart_loopback_det.fw");
  ir::Program p = harness::unwind(model.program, 16);
  sim::SiteSource src({});
  sim::SimOptions opts;
  opts.hw = &hw;
  for (const auto& [n, w] : hw.state_vars) opts.snapshot_vars.push_back(n);
  auto run = sim::simulate(p, src, opts);

  sim::RefSim ref(design);
  // the deterministic driver's schedule, replayed by hand
  ref.set_input("rst_i", 1);
  ref.set_input("we_i", 0);
  ref.set_input("stb_i", 0);
  ref.set_input("adr_i", 0);
  ref.set_input("dat_i", 0);
  ref.step();
  for (const auto& [n, w] : hw.state_vars) CHECK(run.snapshots[0].at(n) == ref.get(n));
  ref.set_input("rst_i", 0);
  ref.set_input("dat_i", 9);
  ref.set_input("we_i", 1);
  ref.set_input("stb_i", 1);
  ref.step();
  for (const auto& [n, w] : hw.state_vars) CHECK(run.snapshots[1].at(n) == ref.get(n));
  ref.set_input("we_i", 0);
  ref.set_input("stb_i", 0);
  for (size_t c = 2; c < run.snapshots.size(); ++c) {
    ref.step();
    for (const auto& [n, w] : hw.state_vars) {
      INFO("cycle ", c, " reg ", n);
      CHECK(run.snapshots[c].at(n) == ref.get(n));
    }
  }
  CHECK(ref.get("dat_o") == 9);
}

TEST_CASE("engine choice is transparent on every bundled benchmark") {
  for (const auto& b : testutil::benchmarks()) {
    auto model = testutil::load_bundled(b.design, b.top, b.fw);
    VerifyOptions pi, fi, mono;
    pi.unwind = fi.unwind = mono.unwind = 3;
    pi.mode = symex::Mode::PartialIncremental;
    fi.mode = symex::Mode::FullIncremental;
    mono.engine = EngineKind::Mono;
    bool vpi = verify_model(model, pi).verdict.safe;
    bool vfi = verify_model(model, fi).verdict.safe;
    bool vmono = verify_model(model, mono).verdict.safe;
    INFO(b.name);
    CHECK(vpi == vfi);
    CHECK(vpi == vmono);
  }
}

TEST_CASE("stats JSON contract") {
  ExplorationStats s;
  s.branch_attempts = 3;
  s.pruned = 1;
  s.completed_paths = 2;
  auto j = s.to_json();
  CHECK(j.at("pruning_percent").get<double>() == doctest::Approx(33.33));
  for (const char* key :
       {"branch_attempts", "pruned", "completed_paths", "pruning_percent",
        "solver_calls", "solver_instances", "stmts_executed", "solve_time_ms",
        "total_time_ms"})
    CHECK(j.contains(key));
}

TEST_CASE("trace JSON round trip") {
  Trace t;
  t.violated_assert = "x";
  t.violation_cycle = 2;
  t.havocs = {{0, "a", 2, 5}, {0, "b", 3, 1}, {1, "a", 4, 7}};
  auto j = t.to_json();
  CHECK(j.at("cycles").size() == 2);
  Trace back = Trace::from_json(j);
  REQUIRE(back.havocs.size() == 3);
  CHECK(back.havocs[0].name == "a");
  CHECK(back.havocs[0].value == 5);
  CHECK(back.havocs[2].cycle == 1);
  CHECK(back.violated_assert == "x");
}

TEST_CASE("enumeration refuses oversized input spaces") {
  auto model = load_model_text("module shell(); endmodule", "shell",
                               "u64 a; u64 b; a = nondet(64); b = nondet(64);\n"
                               "assert(a == a, \"t\");");
  ir::Program p = harness::unwind(model.program, 1);
  CHECK_THROWS_WITH_AS(sim::enumerate_verdict(p, model.hw, 20),
                       doctest::Contains("enumeration infeasible"), coverif::Error);
}
