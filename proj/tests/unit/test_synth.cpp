// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "coverif/compose.hpp"
#include "coverif/refsim.hpp"
#include "coverif/rtl_parse.hpp"
#include "coverif/sim.hpp"
#include "coverif/synth.hpp"
#include "coverif/unwind.hpp"
#include "test_util.hpp"

using namespace coverif;
using synth::build_comb_graph;
using synth::synthesize;

namespace {

rtl::ElaboratedDesign load(const std::string& file, const std::string& top) {
  return rtl::elaborate(rtl::parse_files({testutil::design_path(file)}), top);
}

rtl::ElaboratedDesign from_text(const std::string& text, const std::string& top) {
  return rtl::elaborate(rtl::parse_source(text), top);
}

bool has_edge(const synth::CombDepGraph& g, const std::string& u, const std::string& v) {
  return std::find(g.edges.begin(), g.edges.end(), std::make_pair(u, v)) != g.edges.end();
}

// the eleven equalities of the cross-module feedback example, as unordered
// name pairs
const std::set<std::set<std::string>>& expected_feedback_equalities() {
  static const std::set<std::set<std::string>> exp = {
      {"top.a.foo", "top.a.x"},  {"top.a.y", "top.a.bar"}, {"top.a.x", "top.x"},
      {"top.a.foo", "top.foo"},  {"top.a.bar", "top.bar"}, {"top.a.y", "top.y"},
      {"top.b.bar", "top.b.foo"}, {"top.b.foo", "top.foo"}, {"top.b.bar", "top.bar"},
      {"top.msg", "top.a.msg"},  {"top.a.q", "top.a.msg"},
  };
  return exp;
}

std::set<std::set<std::string>> equality_pairs(const bv::ExprRef& conj) {
  std::set<std::set<std::string>> out;
  std::function<void(const bv::ExprRef&)> walk = [&](const bv::ExprRef& e) {
    if (e->op == bv::Op::And) {
      walk(e->a);
      walk(e->b);
      return;
    }
    REQUIRE(e->op == bv::Op::Eq);
    std::vector<const bv::Expr*> vars;
    bv::collect_vars(e, vars);
    std::set<std::string> pair;
    for (const auto* v : vars) pair.insert(v->name);
    out.insert(pair);
  };
  walk(conj);
  return out;
}

}  // namespace

TEST_CASE("comb graph of the feedback design finds the cross-module exchange") {
  auto design = load("feedback.v", "top");
  auto g = build_comb_graph(design);

  // dependencies named in the figure, under hierarchical names
  CHECK(has_edge(g, "top.b.foo", "top.b.bar"));  // bar = foo inside B
  CHECK(has_edge(g, "top.a.bar", "top.a.y"));    // y = bar inside A
  CHECK(has_edge(g, "top.a.x", "top.a.foo"));    // foo = x inside A

  // one group spans both instances and needs the assumption encoding
  REQUIRE(g.groups.size() >= 1);
  size_t feedback_groups = 0;
  for (const auto& grp : g.groups)
    if (grp.feedback) {
      ++feedback_groups;
      CHECK(grp.equation_indices.size() == 11);
      std::set<int> owners;
      for (size_t e : grp.equation_indices) owners.insert(g.equations[e].owner);
      CHECK(owners.size() == 2);  // spans instances a and b
      CHECK(grp.solvable);        // acyclic at the signal level
    }
  CHECK(feedback_groups == 1);
}

TEST_CASE("design without continuous assigns has an empty graph") {
  auto design = from_text("module m(clk, i); input clk, i; reg r;\n"
                          "always @(posedge clk) r <= i; endmodule",
                          "m");
  auto g = build_comb_graph(design);
  CHECK(g.equations.empty());
  CHECK(g.sccs.empty());
}

TEST_CASE("chain of assigns gives singleton SCCs in topological order") {
  auto design = from_text(
      "module m(in); input in; wire a, b, c;\n"
      "assign a = in; assign b = a; assign c = b; endmodule",
      "m");
  auto g = build_comb_graph(design);
  REQUIRE(g.sccs.size() == 3);
  CHECK(g.sccs[0] == std::vector<std::string>{"m.a"});
  CHECK(g.sccs[1] == std::vector<std::string>{"m.b"});
  CHECK(g.sccs[2] == std::vector<std::string>{"m.c"});
  // nodes are topologically ordered with the input source first
  std::vector<std::string> want = {"m.in", "m.a", "m.b", "m.c"};
  CHECK(g.nodes == want);
}

TEST_CASE("synthesized step for the circuit-to-netlist example") {
  auto design = load("ex1.v", "top");
  auto p = synthesize(design);

  std::vector<std::pair<std::string, unsigned>> want_state = {
      {"top.b", 1}, {"top.d", 1}, {"top.e", 1}};
  CHECK(p.state_vars == want_state);
  CHECK(p.clock == "top.clk");
  CHECK(p.clusters.empty());
  CHECK_FALSE(p.comb_constraint);

  // shadow captures of all three registers first
  REQUIRE(p.step.size() >= 6);
  std::set<std::string> shadows;
  for (int i = 0; i < 3; ++i) {
    CHECK(p.step[i]->kind == ir::StmtKind::Assign);
    shadows.insert(p.step[i]->lhs);
  }
  CHECK(shadows ==
        std::set<std::string>{"top.b__old", "top.d__old", "top.e__old"});

  // then cond := a and c := ite(e_old, 0, d_old), in that order
  CHECK(p.step[3]->lhs == "top.cond");
  CHECK(p.step[4]->lhs == "top.c");
  CHECK(p.step[4]->expr->op == bv::Op::Ite);
  {
    std::vector<const bv::Expr*> vars;
    bv::collect_vars(p.step[4]->expr, vars);
    std::set<std::string> names;
    for (const auto* v : vars) names.insert(v->name);
    CHECK(names == std::set<std::string>{"top.e__old", "top.d__old"});
  }

  // clocked section: b := a, the e branch, d := c
  CHECK(p.step[5]->lhs == "top.b");
  CHECK(p.step[6]->kind == ir::StmtKind::If);
  CHECK(p.step[6]->then_stmts.size() == 1);
  CHECK(p.step[6]->then_stmts[0]->lhs == "top.e");
  CHECK(p.step[6]->else_stmts.size() == 1);
  CHECK(p.step[7]->lhs == "top.d");
}

TEST_CASE("feedback design synthesizes the assumption set of the paper") {
  auto design = load("feedback.v", "top");
  auto p = synthesize(design);

  REQUIRE(p.comb_constraint);
  CHECK(equality_pairs(p.comb_constraint) == expected_feedback_equalities());

  REQUIRE(p.clusters.size() == 1);
  CHECK(p.clusters[0].members.size() == 11);
  CHECK(p.clusters[0].solvable);
  CHECK(p.clusters[0].solve_order.size() == 11);

  // step shape: havocs then one assume, before the clocked body, and the
  // group settles once more afterwards
  size_t assume_count = 0, havoc_count = 0;
  for (const auto& s : p.step) {
    if (s->kind == ir::StmtKind::Assume) ++assume_count;
    if (s->kind == ir::StmtKind::Havoc) ++havoc_count;
  }
  CHECK(assume_count == 2);
  CHECK(havoc_count == 22);
}

TEST_CASE("pure combinational module") {
  auto design = from_text(
      "module m(in, out); input in; output out; assign out = in; endmodule", "m");
  auto p = synthesize(design);
  CHECK(p.state_vars.empty());
  CHECK(p.clock.empty());
  REQUIRE(p.step.size() == 1);
  CHECK(p.step[0]->kind == ir::StmtKind::Assign);
  CHECK(p.step[0]->lhs == "m.out");
}

TEST_CASE("synthesis errors") {
  CHECK_THROWS_WITH_AS(
      synthesize(from_text("module m(c1, c2, i); input c1, c2, i; reg a, b;\n"
                           "always @(posedge c1) a <= i;\n"
                           "always @(posedge c2) b <= i; endmodule",
                           "m")),
      doctest::Contains("clock"), coverif::Error);

  CHECK_THROWS_WITH_AS(
      synthesize(from_text("module m(clk, i); input clk, i; reg r; wire r2;\n"
                           "always @(posedge clk) r <= i;\n"
                           "always @(posedge clk) r <= ~i; endmodule",
                           "m")),
      doctest::Contains("more than one always"), coverif::Error);

  CHECK_THROWS_WITH_AS(
      synthesize(from_text("module m(i); input i; reg r;\n"
                           "always @(*) begin if (i) r = 1; end endmodule",
                           "m")),
      doctest::Contains("latch inference"), coverif::Error);

  CHECK_THROWS_WITH_AS(
      synthesize(from_text("module m(clk, i); input clk, i; reg r;\n"
                           "always @(posedge clk) begin r = i; r <= ~i; end endmodule",
                           "m")),
      doctest::Contains("mixes blocking"), coverif::Error);
}

TEST_CASE("combinational always blocks if-convert") {
  auto design = from_text(
      "module m(s, a, b, o); input s, a, b; output o; reg o;\n"
      "always @(*) begin if (s) o = a; else o = b; end endmodule",
      "m");
  auto p = synthesize(design);
  REQUIRE(p.step.size() == 1);
  CHECK(p.step[0]->lhs == "m.o");
  CHECK(p.step[0]->expr->op == bv::Op::Ite);
}

TEST_CASE("emit_c reproduces the column-4 structure") {
  auto p = synthesize(load("ex1.v", "top"));
  std::string c = synth::emit_c(p);

  CHECK(c.find("struct state_elements_top") != std::string::npos);
  CHECK(c.find("b_old = top.b;") != std::string::npos);
  CHECK(c.find("d_old = top.d;") != std::string::npos);
  CHECK(c.find("e_old = top.e;") != std::string::npos);
  CHECK(c.find("c = (e_old ? ") != std::string::npos);  // the mux for c
  CHECK(c.find("while (1)") != std::string::npos);

  // the state struct holds exactly b, d, e
  auto at = c.find("struct state_elements_top {");
  auto end = c.find("};", at);
  std::string body = c.substr(at, end - at);
  CHECK(body.find("_Bool b;") != std::string::npos);
  CHECK(body.find("_Bool d;") != std::string::npos);
  CHECK(body.find("_Bool e;") != std::string::npos);
  CHECK(body.find("c;") == std::string::npos);
  CHECK(body.find("cond;") == std::string::npos);
}

TEST_CASE("emit_c renders the feedback assumption") {
  auto p = synthesize(load("feedback.v", "top"));
  std::string c = synth::emit_c(p);
  CHECK(c.find("void top_comb(void)") != std::string::npos);
  CHECK(c.find("assume(") != std::string::npos);
  CHECK(c.find("(top.a.foo == top.a.x)") != std::string::npos);
  CHECK(c.find("(top.b.bar == top.b.foo)") != std::string::npos);
}

TEST_CASE("emit_c of an empty design") {
  auto p = synthesize(from_text("module e(); endmodule", "e"));
  std::string c = synth::emit_c(p);
  CHECK(c.find("struct state_elements_e") != std::string::npos);
  CHECK(c.find("void e_cycle(void) {") != std::string::npos);
}

TEST_CASE("synthesis is deterministic") {
  for (const char* file : {"ex1.v", "feedback.v", "mini_uart.v"}) {
    std::string top = std::string(file) == "ex1.v" || std::string(file) == "feedback.v"
                          ? "top"
                          : "mini_uart";
    std::string a = synth::emit_c(synthesize(load(file, top)));
    std::string b = synth::emit_c(synthesize(load(file, top)));
    CHECK(a == b);
  }
}

// ---- simulation equivalence against the two-phase reference ----

namespace {

// Drive both simulators with the same input sequence and compare register
// trajectories.
void check_equivalence(const std::string& file, const std::string& top,
                       int rounds, unsigned max_len, uint64_t seed) {
  auto design = load(file, top);
  auto hw = synthesize(design);

  // harness: every input havocked each cycle
  fw::FirmwareProgram loop = fw::parse_fw("while (1) { step(); }");
  harness::ComposedModel model = harness::compose(loop, hw);

  std::mt19937_64 rng(seed);
  for (int round = 0; round < rounds; ++round) {
    unsigned len = 1 + rng() % max_len;
    ir::Program prog = harness::unwind(model.program, len);

    // one value per havoc site per cycle
    auto instrs = ir::flatten(prog);
    std::map<size_t, uint64_t> site_values;
    // record values per (cycle, input) to drive the reference simulator
    std::map<std::pair<int, std::string>, uint64_t> by_cycle;
    for (size_t i = 0; i < instrs.size(); ++i) {
      if (instrs[i].kind != ir::InstrKind::Havoc) continue;
      uint64_t v = rng() & bv::width_mask(instrs[i].width);
      bool cluster = false;
      for (const auto& c : hw.clusters)
        for (const auto& m : c.members)
          if (m == instrs[i].lhs) cluster = true;
      if (cluster) continue;  // solved from the equations
      site_values[i] = v;
      by_cycle[{instrs[i].cycle, instrs[i].lhs}] = v;
    }

    sim::SiteSource source(std::move(site_values));
    sim::SimOptions opts;
    opts.hw = &hw;
    for (const auto& [n, w] : hw.state_vars) opts.snapshot_vars.push_back(n);
    sim::SimResult run = sim::simulate(prog, source, opts);
    REQUIRE_FALSE(run.vacuous);
    REQUIRE(run.snapshots.size() == len);

    sim::RefSim ref(design);
    for (unsigned cycle = 0; cycle < len; ++cycle) {
      for (const auto& [n, w] : hw.inputs) {
        auto it = by_cycle.find({static_cast<int>(cycle), n});
        if (it != by_cycle.end()) ref.set_input(n, it->second);
      }
      ref.step();
      for (const auto& [n, w] : hw.state_vars) {
        INFO(file, " cycle ", cycle, " register ", n);
        CHECK(run.snapshots[cycle].at(n) == ref.get(n));
      }
    }
  }
}

}  // namespace

TEST_CASE("simulation equivalence with the reference simulator") {
  // 1000 random sequences in total, split over the bundled designs
  check_equivalence("ex1.v", "top", 400, 8, 101);
  check_equivalence("feedback.v", "top", 300, 8, 202);
  check_equivalence("mini_uart.v", "mini_uart", 300, 8, 303);
}

TEST_CASE("swapping always blocks does not change trajectories") {
  // two clocked blocks exchanging registers; shadows make source order
  // irrelevant
  std::string body_a = "always @(posedge clk) x <= y + i;\n";
  std::string body_b = "always @(posedge clk) y <= x ^ 1;\n";
  std::string header =
      "module m(clk, i); input clk, i; reg [3:0] x; reg [3:0] y;\n";
  auto d1 = from_text(header + body_a + body_b + "endmodule", "m");
  auto d2 = from_text(header + body_b + body_a + "endmodule", "m");

  auto run = [&](const rtl::ElaboratedDesign& d, uint64_t seed) {
    auto hw = synthesize(d);
    auto model = harness::compose(fw::parse_fw("while (1) { step(); }"), hw);
    ir::Program prog = harness::unwind(model.program, 6);
    auto instrs = ir::flatten(prog);
    std::mt19937_64 rng(seed);
    std::map<size_t, uint64_t> vals;
    for (size_t i = 0; i < instrs.size(); ++i)
      if (instrs[i].kind == ir::InstrKind::Havoc)
        vals[i] = rng() & bv::width_mask(instrs[i].width);
    sim::SiteSource src(std::move(vals));
    sim::SimOptions opts;
    opts.hw = &hw;
    opts.snapshot_vars = {"m.x", "m.y"};
    return sim::simulate(prog, src, opts).snapshots;
  };
  for (uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
    auto s1 = run(d1, seed);
    auto s2 = run(d2, seed);
    CHECK(s1 == s2);
  }
}

TEST_CASE("step routine reads only previously defined values") {
  // the well-formedness invariant behind the acyclicity requirement:
  // a forward pass sees a definition for every read, except state,
  // inputs and havocked signals
  for (const char* file : {"ex1.v", "feedback.v", "mini_uart.v"}) {
    std::string top = std::string(file) == "mini_uart.v" ? "mini_uart" : "top";
    auto hw = synthesize(load(file, top));

    std::set<std::string> defined;
    for (const auto& [n, w] : hw.state_vars) defined.insert(n);
    for (const auto& [n, w] : hw.inputs) defined.insert(n);
    for (const auto& s : hw.init) defined.insert(s->lhs);

    std::function<void(const std::vector<ir::StmtPtr>&)> walk =
        [&](const std::vector<ir::StmtPtr>& stmts) {
          for (const auto& s : stmts) {
            auto check_reads = [&](const bv::ExprRef& e) {
              if (!e) return;
              std::vector<const bv::Expr*> vars;
              bv::collect_vars(e, vars);
              for (const auto* v : vars) {
                INFO(file, ": read of ", v->name);
                CHECK(defined.contains(v->name));
              }
            };
            check_reads(s->expr);
            if (s->kind == ir::StmtKind::Assign || s->kind == ir::StmtKind::Havoc)
              defined.insert(s->lhs);
            if (s->kind == ir::StmtKind::If) {
              walk(s->then_stmts);
              walk(s->else_stmts);
            }
          }
        };
    walk(hw.step);
  }
}
