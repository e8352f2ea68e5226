// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "coverif/bitblast.hpp"
#include "test_util.hpp"

using namespace coverif;
using blast::CnfInstance;
using sat::Status;

namespace {

// exhaustive satisfiability of a width-1 expression over its variables
bool enum_satisfiable(const bv::ExprRef& e,
                      const std::vector<std::pair<std::string, unsigned>>& vars) {
  unsigned bits = 0;
  for (const auto& [n, w] : vars) bits += w;
  for (uint64_t m = 0; m < (uint64_t{1} << bits); ++m) {
    bv::Env env;
    unsigned at = 0;
    for (const auto& [n, w] : vars) {
      env.set(n, 1, (m >> at) & bv::width_mask(w));
      at += w;
    }
    if (bv::eval(e, env)) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("a and not a is unsatisfiable") {
  CnfInstance inst;
  bv::ExprRef x = bv::var("x", 1, 1);
  inst.assert_true(bv::land(x, bv::lnot(x)));
  CHECK(inst.solve() == Status::Unsat);
}

TEST_CASE("x + y = 5 at width 3 is satisfiable with a correct model") {
  // enumeration oracle first: some pair of 3-bit values sums to 5 mod 8
  bv::ExprRef x = bv::var("x", 1, 3);
  bv::ExprRef y = bv::var("y", 1, 3);
  bv::ExprRef cond = bv::eq(bv::add(x, y), bv::constant(5, 3));
  REQUIRE(enum_satisfiable(cond, {{"x", 3}, {"y", 3}}));

  CnfInstance inst;
  inst.assert_true(cond);
  REQUIRE(inst.solve() == Status::Sat);
  uint64_t xv = inst.model_value("x", 1, 3);
  uint64_t yv = inst.model_value("y", 1, 3);
  CHECK(((xv + yv) & 7) == 5);
}

TEST_CASE("(c & 3) << d = 12 at width 8 with d = 2") {
  bv::ExprRef c = bv::var("c", 1, 8);
  bv::ExprRef cond = bv::eq(
      bv::shl(bv::bv_and(c, bv::constant(3, 8)), bv::constant(2, 8)),
      bv::constant(12, 8));
  REQUIRE(enum_satisfiable(cond, {{"c", 8}}));
  CnfInstance inst;
  inst.assert_true(cond);
  REQUIRE(inst.solve() == Status::Sat);
  CHECK((inst.model_value("c", 1, 8) & 3) == 3);
}

TEST_CASE("empty instance is satisfiable") {
  CnfInstance inst;
  CHECK(inst.solve() == Status::Sat);
}

TEST_CASE("activation literal semantics") {
  CnfInstance inst;
  bv::ExprRef x = bv::var("x", 1, 1);
  sat::Lit b = inst.fresh_lit();
  inst.assert_implies(b, x);
  inst.assert_implies(b, bv::lnot(x));
  CHECK(inst.solve({b}) == Status::Unsat);
  CHECK(inst.solve() == Status::Sat);
  // disabling the guard permanently keeps the instance satisfiable
  inst.solver().add_clause({~b});
  CHECK(inst.solve() == Status::Sat);
}

TEST_CASE("segment-wise addition equals batch addition") {
  std::mt19937_64 rng(51);
  for (int round = 0; round < 200; ++round) {
    testutil::ExprGen gen(rng());
    gen.vars = {{"a", 4}, {"b", 4}, {"c", 2}};
    bv::ExprRef e1 = gen.gen(1, 3);
    bv::ExprRef e2 = gen.gen(1, 3);
    bv::ExprRef e3 = gen.gen(1, 3);

    CnfInstance batch;
    batch.assert_true(e1);
    batch.assert_true(e2);
    batch.assert_true(e3);
    Status want = batch.solve();

    CnfInstance inc;
    inc.assert_true(e1);
    Status s1 = inc.solve();
    inc.assert_true(e2);
    Status s2 = inc.solve();
    inc.assert_true(e3);
    Status got = inc.solve();
    CHECK(got == want);
    // monotone: adding clauses never turns unsat into sat
    if (s1 == Status::Unsat) CHECK(s2 == Status::Unsat);
    if (s2 == Status::Unsat) CHECK(got == Status::Unsat);
  }
}

TEST_CASE("blasting soundness on random formulas") {
  std::mt19937_64 rng(53);
  int sat_seen = 0, unsat_seen = 0;
  for (int round = 0; round < 1500; ++round) {
    testutil::ExprGen gen(rng());
    std::vector<std::pair<std::string, unsigned>> vars = {
        {"a", 1 + static_cast<unsigned>(rng() % 6)},
        {"b", 1 + static_cast<unsigned>(rng() % 6)},
        {"c", 1 + static_cast<unsigned>(rng() % 6)},
    };
    gen.vars = vars;
    bv::ExprRef e = gen.gen(1, 3);

    bool expected = enum_satisfiable(e, vars);
    CnfInstance inst;
    for (const auto& [n, w] : vars) inst.touch_var(n, 1, w);
    inst.assert_true(e);
    Status got = inst.solve();
    CHECK((got == Status::Sat) == expected);
    if (got == Status::Sat) {
      ++sat_seen;
      bv::Env env;
      for (const auto& [n, w] : vars) env.set(n, 1, inst.model_value(n, 1, w));
      CHECK(bv::eval(e, env) == 1);
    } else {
      ++unsat_seen;
    }
  }
  // the generator must exercise both outcomes for this test to mean much
  CHECK(sat_seen > 100);
  CHECK(unsat_seen > 20);
}

TEST_CASE("DIMACS export") {
  CnfInstance inst;
  inst.assert_true(bv::eq(bv::add(bv::var("x", 1, 3), bv::var("y", 1, 3)),
                          bv::constant(5, 3)));
  std::ostringstream os;
  inst.write_dimacs(os);
  std::string text = os.str();
  CHECK(text.rfind("p cnf ", 0) == 0);
  int vars = 0, clauses = 0;
  sscanf(text.c_str(), "p cnf %d %d", &vars, &clauses);
  CHECK(vars > 0);
  CHECK(clauses > 0);
  // every listed clause terminates with 0
  size_t lines = std::count(text.begin(), text.end(), '\n');
  CHECK(lines == static_cast<size_t>(clauses) + 1);
}

TEST_CASE("resource limits surface as errors, not verdicts") {
  // pigeonhole: 5 pigeons, 4 holes; hard enough to exceed a one-conflict
  // budget but still a genuine Unsat instance
  sat::Solver s;
  const int P = 5, H = 4;
  std::vector<std::vector<sat::Var>> v(P, std::vector<sat::Var>(H));
  for (int p = 0; p < P; ++p)
    for (int h = 0; h < H; ++h) v[p][h] = s.new_var();
  for (int p = 0; p < P; ++p) {
    std::vector<sat::Lit> c;
    for (int h = 0; h < H; ++h) c.push_back(sat::mk_lit(v[p][h]));
    s.add_clause(c);
  }
  for (int h = 0; h < H; ++h)
    for (int p1 = 0; p1 < P; ++p1)
      for (int p2 = p1 + 1; p2 < P; ++p2)
        s.add_clause({sat::mk_lit(v[p1][h], true), sat::mk_lit(v[p2][h], true)});

  s.set_conflict_budget(1);
  CHECK_THROWS_AS(s.solve(), coverif::SolverLimit);

  sat::Solver s2;
  std::vector<std::vector<sat::Var>> v2(P, std::vector<sat::Var>(H));
  for (int p = 0; p < P; ++p)
    for (int h = 0; h < H; ++h) v2[p][h] = s2.new_var();
  for (int p = 0; p < P; ++p) {
    std::vector<sat::Lit> c;
    for (int h = 0; h < H; ++h) c.push_back(sat::mk_lit(v2[p][h]));
    s2.add_clause(c);
  }
  for (int h = 0; h < H; ++h)
    for (int p1 = 0; p1 < P; ++p1)
      for (int p2 = p1 + 1; p2 < P; ++p2)
        s2.add_clause({sat::mk_lit(v2[p1][h], true), sat::mk_lit(v2[p2][h], true)});
  CHECK(s2.solve() == Status::Unsat);
}
