// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "coverif/bv.hpp"
#include "coverif/bv_json.hpp"
#include "test_util.hpp"

using namespace coverif::bv;
using testutil::BitArray;

namespace {

uint64_t eval1(const ExprRef& e) {
  Env env;
  return eval(e, env);
}

}  // namespace

TEST_CASE("eval of the netlist mux: ite(e_old, 0, d_old)") {
  ExprRef e = ite(var("e_old", 0, 1), constant(0, 1), var("d_old", 0, 1));
  Env env;
  env.set("e_old", 0, 1);
  env.set("d_old", 0, 1);
  CHECK(eval(e, env) == 0);
  env.set("e_old", 0, 0);
  CHECK(eval(e, env) == 1);
}

TEST_CASE("and with zero annihilates") {
  for (unsigned w : {1u, 3u, 8u, 32u}) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
      Env env;
      env.set("x", 0, rng() & width_mask(w));
      CHECK(eval(bv_and(var("x", 0, w), constant(0, w)), env) == 0);
    }
  }
}

TEST_CASE("(c & 3) << d at width 32") {
  // brute force over small c, d agrees with the closed-form expectation
  for (uint64_t c = 0; c < 16; ++c)
    for (uint64_t d = 0; d < 8; ++d) {
      Env env;
      env.set("c", 0, c);
      env.set("d", 0, d);
      ExprRef e = shl(bv_and(var("c", 0, 32), constant(3, 32)), var("d", 0, 32));
      CHECK(eval(e, env) == (((c & 3) << d) & width_mask(32)));
    }
  Env env;
  env.set("c", 0, 7);
  env.set("d", 0, 2);
  CHECK(eval(shl(bv_and(var("c", 0, 32), constant(3, 32)), var("d", 0, 32)), env) == 12);
}

TEST_CASE("unbound variable is an error") {
  Env env;
  CHECK_THROWS_AS(eval(var("nope", 0, 4), env), coverif::Error);
}

TEST_CASE("bit assignment lowering: out1[7:5] = in1[4:2]") {
  // reference: bit-array simulation of the selects
  auto reference = [](uint64_t out1, uint64_t in1) {
    BitArray o(8, out1), i(8, in1);
    o.assign_slice(7, 5, i, 4, 2);
    return o.value();
  };
  ExprRef out1 = var("out1", 0, 8);
  ExprRef in1 = var("in1", 0, 8);
  ExprRef lowered = lower_bit_assign(out1, 7, 5, extract(in1, 4, 2));

  std::mt19937_64 rng(11);
  for (int k = 0; k < 1000; ++k) {
    uint64_t o = rng() & 0xff, i = rng() & 0xff;
    Env env;
    env.set("out1", 0, o);
    env.set("in1", 0, i);
    CHECK(eval(lowered, env) == reference(o, i));
  }

  Env env;
  env.set("out1", 0, 0x00);
  env.set("in1", 0, 0x14);
  CHECK(eval(lowered, env) == 0xA0);

  // the keep-mask clears exactly bits [7:5]
  env.set("out1", 0, 0xff);
  env.set("in1", 0, 0x00);
  CHECK(eval(lowered, env) == 0x1f);
}

TEST_CASE("whole-vector bit assignment is the identity on rhs") {
  ExprRef rhs = var("r", 0, 8);
  ExprRef lowered = lower_bit_assign(var("out", 0, 8), 7, 0, rhs);
  CHECK(lowered.get() == rhs.get());
}

TEST_CASE("bit assignment rejects out-of-range indices") {
  CHECK_THROWS_AS(lower_bit_assign(var("x", 0, 8), 8, 0, constant(0, 8)),
                  coverif::Error);
  CHECK_THROWS_AS(lower_bit_assign(var("x", 0, 8), 2, 5, constant(0, 8)),
                  coverif::Error);
}

TEST_CASE("concat lowering: {in2[5:2], in1[6:1]}") {
  ExprRef in1 = var("in1", 0, 8);
  ExprRef in2 = var("in2", 0, 8);
  ExprRef lowered = lower_concat({{in2, 5, 2}, {in1, 6, 1}});
  CHECK(lowered->width == 10);

  auto reference = [](uint64_t i1, uint64_t i2) {
    BitArray a(8, i2), b(8, i1);
    return BitArray::concat({a.slice(5, 2), b.slice(6, 1)}).value();
  };
  std::mt19937_64 rng(13);
  for (int k = 0; k < 1000; ++k) {
    uint64_t i1 = rng() & 0xff, i2 = rng() & 0xff;
    Env env;
    env.set("in1", 0, i1);
    env.set("in2", 0, i2);
    CHECK(eval(lowered, env) == reference(i1, i2));
  }
  Env env;
  env.set("in1", 0, 0x00);
  env.set("in2", 0, 0xFF);
  CHECK(eval(lowered, env) == 0x3C0);
}

TEST_CASE("single-operand concat is unchanged") {
  ExprRef x = var("x", 0, 6);
  ExprRef lowered = lower_concat({{x, 5, 0}});
  CHECK(struct_eq(lowered, x));
}

TEST_CASE("indexed part-select reduces to extract") {
  ExprRef in = var("in", 0, 32);
  // in[8*i +: 8] with i = 2
  ExprRef lowered = lower_indexed_part_select(in, constant(16, 32), 8);
  CHECK(lowered->op == Op::Extract);
  CHECK(lowered->hi == 23);
  CHECK(lowered->lo == 16);

  // in[0 +: width] is the identity
  CHECK(lower_indexed_part_select(in, constant(0, 32), 32).get() == in.get());

  // non-constant offsets are rejected
  CHECK_THROWS_AS(lower_indexed_part_select(in, var("i", 0, 32), 8), coverif::Error);
}

TEST_CASE("byte-wise copy through indexed part-selects") {
  // for i in 0..3: out[8i +: 8] = in[8i +: 8] copies the word
  std::mt19937_64 rng(17);
  for (int k = 0; k < 256; ++k) {
    uint64_t in_v = rng() & width_mask(32);
    Env env;
    env.set("in", 0, in_v);
    env.set("out", 0, 0);
    uint64_t out_v = 0;
    for (unsigned i = 0; i < 4; ++i) {
      ExprRef byte = lower_indexed_part_select(var("in", 0, 32), constant(8 * i, 32), 8);
      ExprRef upd = lower_bit_assign(constant(out_v, 32), 8 * i + 7, 8 * i, byte);
      out_v = eval(upd, env);
    }
    CHECK(out_v == in_v);
  }
}

TEST_CASE("lowering soundness against the bit-array reference") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 3000; ++k) {
    unsigned w = 1 + rng() % 16;
    unsigned hi = rng() % w;
    unsigned lo = rng() % (hi + 1);
    unsigned fw = hi - lo + 1;
    unsigned src_w = fw + rng() % 8;
    uint64_t base_v = rng() & width_mask(w);
    uint64_t src_v = rng() & width_mask(src_w);

    Env env;
    env.set("b", 0, base_v);
    env.set("s", 0, src_v);
    ExprRef low =
        lower_bit_assign(var("b", 0, w), hi, lo, fit(var("s", 0, src_w), fw));
    BitArray ref(w, base_v);
    ref.assign_slice(hi, lo, BitArray(src_w, src_v), fw - 1, 0);
    CHECK(eval(low, env) == ref.value());
  }
}

TEST_CASE("algebraic identities at several widths") {
  std::mt19937_64 rng(29);
  for (unsigned w : {1u, 3u, 8u, 32u}) {
    for (int k = 0; k < 200; ++k) {
      uint64_t a = rng() & width_mask(w);
      uint64_t b = rng() & width_mask(w);
      uint64_t c = rng() & width_mask(w);
      Env env;
      env.set("a", 0, a);
      env.set("b", 0, b);
      env.set("c", 0, c);
      ExprRef va = var("a", 0, w), vb = var("b", 0, w), vc = var("c", 0, w);

      CHECK(eval(bv_xor(va, va), env) == 0);
      CHECK(eval(add(add(va, vb), vc), env) == eval(add(va, add(vb, vc)), env));
      if (w >= 2) {
        // extract of concat recovers the operand
        unsigned wb = w / 2, wa = w - wb;
        ExprRef cc = concat(fit(va, wa), fit(vb, wb));
        CHECK(eval(extract(cc, w - 1, wb), env) == (a & width_mask(wa)));
        CHECK(eval(extract(cc, wb - 1, 0), env) == (b & width_mask(wb)));
      }
      if (w < 64) {
        CHECK(eval(extract(zext(va, w + 1), w - 1, 0), env) == a);
      }
    }
  }
}

TEST_CASE("eval stays inside the width on random expressions") {
  testutil::ExprGen gen(31);
  gen.vars = {{"x", 5}, {"y", 3}, {"z", 8}};
  std::mt19937_64 rng(37);
  for (int k = 0; k < 2000; ++k) {
    unsigned w = 1 + rng() % 12;
    ExprRef e = gen.gen(w, 3);
    Env env;
    env.set("x", 1, rng() & width_mask(5));
    env.set("y", 1, rng() & width_mask(3));
    env.set("z", 1, rng() & width_mask(8));
    uint64_t v = eval(e, env);
    CHECK(v <= width_mask(e->width));
  }
}

TEST_CASE("shifts at or beyond the width yield zero") {
  Env env;
  env.set("x", 0, 0b1011);
  for (uint64_t amt : {4ull, 5ull, 63ull}) {
    CHECK(eval(shl(var("x", 0, 4), constant(amt, 8)), env) == 0);
    CHECK(eval(lshr(var("x", 0, 4), constant(amt, 8)), env) == 0);
  }
}

TEST_CASE("constants must fit their width") {
  CHECK_THROWS_AS(constant(8, 3), coverif::Error);
  CHECK(constant(7, 3)->value == 7);
}

TEST_CASE("expression JSON round trip") {
  testutil::ExprGen gen(41);
  gen.vars = {{"a", 4}, {"b", 7}};
  for (int k = 0; k < 200; ++k) {
    ExprRef e = gen.gen(1 + k % 10, 3);
    ExprRef back = from_json(to_json(e));
    // constructors may re-fold, so compare semantics
    std::mt19937_64 rng(k);
    for (int t = 0; t < 20; ++t) {
      Env env;
      env.set("a", 1, rng() & width_mask(4));
      env.set("b", 1, rng() & width_mask(7));
      CHECK(eval(e, env) == eval(back, env));
    }
  }
}
