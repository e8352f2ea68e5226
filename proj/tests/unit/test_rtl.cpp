// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <functional>

#include "coverif/elaborate.hpp"
#include "coverif/rtl_parse.hpp"
#include "test_util.hpp"

using namespace coverif::rtl;

TEST_CASE("parse module B from the two-module design") {
  auto mods = parse_source(
      "module B(foo,bar); input foo; output bar; assign bar=foo; endmodule");
  REQUIRE(mods.size() == 1);
  const ModuleAst& b = mods[0];
  CHECK(b.name == "B");
  REQUIRE(b.ports.size() == 2);
  CHECK(b.ports[0].name == "foo");
  CHECK(b.ports[0].dir == Dir::Input);
  CHECK(b.ports[1].name == "bar");
  CHECK(b.ports[1].dir == Dir::Output);
  CHECK(b.continuous_assigns.size() == 1);
  CHECK(b.continuous_assigns[0].lhs.name == "bar");
  CHECK(b.always_blocks.empty());

  auto design = elaborate(mods, "B");
  CHECK(design.signal("B.foo").width == 1);
  CHECK(design.signal("B.bar").width == 1);
}

TEST_CASE("empty module parses") {
  auto mods = parse_source("module E(); endmodule");
  REQUIRE(mods.size() == 1);
  CHECK(mods[0].name == "E");
  CHECK(mods[0].ports.empty());
  CHECK(mods[0].nets.empty());
  CHECK(mods[0].instances.empty());
}

TEST_CASE("ranged wire gets its declared width") {
  auto mods = parse_source(
      "module m(); wire [2:0] msg; assign msg = 3'b101; endmodule");
  auto design = elaborate(mods, "m");
  CHECK(design.signal("m.msg").width == 3);
  CHECK(design.signal("m.msg").kind == NetKind::Wire);
}

TEST_CASE("syntax errors carry file, line and column") {
  try {
    parse_source("module m();\n  wire [2:0 x;\nendmodule", "bad.v");
    FAIL("expected a parse error");
  } catch (const coverif::Error& e) {
    REQUIRE(e.where().has_value());
    CHECK(e.where()->file == "bad.v");
    CHECK(e.where()->line == 2);
    CHECK(std::string(e.what()).find("bad.v:2:") == 0);
  }
}

TEST_CASE("unsupported constructs are named") {
  CHECK_THROWS_WITH_AS(parse_source("module m(); initial begin #5 x = 1; end endmodule"),
                       doctest::Contains("unsupported construct"), coverif::Error);
  CHECK_THROWS_WITH_AS(parse_source("module m(); always @(*) fork join endmodule"),
                       doctest::Contains("fork"), coverif::Error);
  CHECK_THROWS_WITH_AS(parse_source("module m(); real r; endmodule"),
                       doctest::Contains("real"), coverif::Error);
  CHECK_THROWS_WITH_AS(parse_source("module m(input clk); endmodule"),
                       doctest::Contains("ANSI"), coverif::Error);
  CHECK_THROWS_WITH_AS(parse_source("module m(); wire w; assign w = 1'bx; endmodule"),
                       doctest::Contains("four-valued"), coverif::Error);
}

TEST_CASE("duplicate module names are rejected") {
  CHECK_THROWS_WITH_AS(parse_source("module m(); endmodule module m(); endmodule"),
                       doctest::Contains("duplicate module"), coverif::Error);
}

TEST_CASE("elaboration of the two-instance hierarchy") {
  auto mods = parse_files({testutil::design_path("feedback.v")});
  auto design = elaborate(mods, "top");

  REQUIRE(design.instance_tree.size() == 3);
  CHECK(design.instance_tree[0].path == "top");
  CHECK(design.instance_tree[1].path == "top.a");
  CHECK(design.instance_tree[1].module == "A");
  CHECK(design.instance_tree[2].path == "top.b");
  CHECK(design.instance_tree[2].module == "B");

  const SignalInfo& q = design.signal("top.a.q");
  CHECK(q.kind == NetKind::Reg);
  CHECK(q.width == 3);
}

TEST_CASE("single module yields a one-node tree") {
  auto design = elaborate(parse_source("module m(); wire w; assign w = 0; endmodule"), "m");
  CHECK(design.instance_tree.size() == 1);
}

TEST_CASE("unknown instantiated module") {
  auto mods = parse_source("module top(); C c(); endmodule");
  CHECK_THROWS_WITH_AS(elaborate(mods, "top"), doctest::Contains("unknown module C"),
                       coverif::Error);
}

TEST_CASE("unknown top module") {
  CHECK_THROWS_WITH_AS(elaborate(parse_source("module m(); endmodule"), "nope"),
                       doctest::Contains("unknown module"), coverif::Error);
}

TEST_CASE("recursive instantiation is rejected") {
  auto mods = parse_source("module a(); a inner(); endmodule");
  CHECK_THROWS_WITH_AS(elaborate(mods, "a"), doctest::Contains("recursive"),
                       coverif::Error);
}

TEST_CASE("unbound and mismatched ports are rejected") {
  auto text = std::string("module leaf(i); input [3:0] i; endmodule\n");
  CHECK_THROWS_WITH_AS(
      elaborate(parse_source(text + "module top(); leaf l(); endmodule"), "top"),
      doctest::Contains("unbound formal port"), coverif::Error);
  CHECK_THROWS_WITH_AS(
      elaborate(parse_source(text +
                             "module top(); wire w; leaf l(.i(w)); endmodule"),
                "top"),
      doctest::Contains("width mismatch"), coverif::Error);
}

TEST_CASE("inout ports are rejected at elaboration") {
  auto mods = parse_source("module m(x); inout x; endmodule");
  CHECK_THROWS_WITH_AS(elaborate(mods, "m"), doctest::Contains("inout"), coverif::Error);
}

TEST_CASE("identifiers must resolve") {
  auto mods = parse_source("module m(); wire w; assign w = ghost; endmodule");
  CHECK_THROWS_WITH_AS(elaborate(mods, "m"), doctest::Contains("unknown identifier"),
                       coverif::Error);
}

TEST_CASE("multiple continuous drivers are rejected") {
  auto mods = parse_source(
      "module m(); wire w; assign w = 0; assign w = 1; endmodule");
  CHECK_THROWS_WITH_AS(elaborate(mods, "m"), doctest::Contains("multiple continuous"),
                       coverif::Error);
}

TEST_CASE("pretty-print round trip is structurally stable") {
  for (const char* file : {"ex1.v", "feedback.v", "mini_uart.v"}) {
    std::string text = testutil::read_file(testutil::design_path(file));
    auto first = parse_source(text, file);
    std::string printed = print_verilog(first);
    auto second = parse_source(printed, "printed.v");
    REQUIRE(first.size() == second.size());
    for (size_t i = 0; i < first.size(); ++i)
      CHECK(dump(first[i]) == dump(second[i]));
  }
}

TEST_CASE("width inference is total over the elaborated design") {
  auto design = elaborate(parse_files({testutil::design_path("feedback.v")}), "top");
  std::function<void(const ExprAst&)> walk = [&](const ExprAst& e) {
    CHECK(e.inferred_width >= 1);
    if (e.lhs) walk(*e.lhs);
    if (e.rhs) walk(*e.rhs);
    if (e.cond) walk(*e.cond);
    if (e.index) walk(*e.index);
    for (const auto& op : e.operands) walk(*op);
  };
  for (const auto& [name, mod] : design.modules) {
    for (const auto& ca : mod.continuous_assigns) walk(*ca.rhs);
    for (const auto& [pname, actual] : [&] {
           std::vector<std::pair<std::string, ExprPtr>> all;
           for (const auto& inst : mod.instances)
             for (const auto& b : inst.bindings) all.push_back(b);
           return all;
         }())
      walk(*actual);
  }
  // concat width is the sum of operand widths; comparisons are width 1
  auto mods = parse_source(
      "module m(); wire [7:0] a; wire [3:0] b; wire [11:0] c; wire d;\n"
      "assign a = 8'd1; assign b = 4'd2; assign c = {a, b}; assign d = a < 5;\n"
      "endmodule");
  auto d2 = elaborate(mods, "m");
  const auto& m = d2.modules.at("m");
  CHECK(m.continuous_assigns[2].rhs->inferred_width == 12);
  CHECK(m.continuous_assigns[3].rhs->inferred_width == 1);
}

TEST_CASE("elaboration is deterministic") {
  for (const char* file : {"feedback.v", "mini_uart.v"}) {
    auto a = elaborate(parse_files({testutil::design_path(file)}),
                       file[0] == 'f' ? "top" : "mini_uart");
    auto b = elaborate(parse_files({testutil::design_path(file)}),
                       file[0] == 'f' ? "top" : "mini_uart");
    REQUIRE(a.signal_table.size() == b.signal_table.size());
    for (size_t i = 0; i < a.signal_table.size(); ++i) {
      CHECK(a.signal_table[i].name == b.signal_table[i].name);
      CHECK(a.signal_table[i].width == b.signal_table[i].width);
      CHECK((a.signal_table[i].kind == b.signal_table[i].kind));
    }
  }
}

TEST_CASE("parameters fold into ranges and expressions") {
  auto design = elaborate(
      parse_source("module m(); parameter W = 4; parameter TOP = W - 1;\n"
                   "wire [TOP:0] d; assign d = W; endmodule"),
      "m");
  CHECK(design.signal("m.d").width == 4);
  CHECK(design.params.at("m").at("W") == 4);
  CHECK(design.params.at("m").at("TOP") == 3);
}
