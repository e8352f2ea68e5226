// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "coverif/bv.hpp"
#include "coverif/verify.hpp"

#ifndef COVERIF_DESIGNS_DIR
#define COVERIF_DESIGNS_DIR "designs"
#endif

namespace testutil {

inline std::string design_path(const std::string& name) {
  return std::string(COVERIF_DESIGNS_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw coverif::Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- independent bit-array reference for the lowering oracle ----
//
// Values are manipulated bit by bit; no shifts or masks, so it cannot
// share a bug with the mask/shift lowering it checks.
class BitArray {
 public:
  explicit BitArray(unsigned width, uint64_t value = 0) : bits_(width, false) {
    for (unsigned i = 0; i < width; ++i) bits_[i] = (value >> i) & 1;
  }
  unsigned width() const { return static_cast<unsigned>(bits_.size()); }
  bool get(unsigned i) const { return bits_.at(i); }
  void set(unsigned i, bool b) { bits_.at(i) = b; }

  uint64_t value() const {
    uint64_t v = 0;
    for (unsigned i = 0; i < width(); ++i)
      if (bits_[i]) v |= uint64_t{1} << i;
    return v;
  }

  // this[hi:lo] = src[src_hi:src_lo], other bits unchanged
  void assign_slice(unsigned hi, unsigned lo, const BitArray& src, unsigned src_hi,
                    unsigned src_lo) {
    unsigned n = hi - lo + 1;
    for (unsigned i = 0; i < n; ++i) {
      bool b = src_lo + i <= src_hi && src_lo + i < src.width() ? src.get(src_lo + i) : false;
      set(lo + i, b);
    }
  }

  BitArray slice(unsigned hi, unsigned lo) const {
    BitArray out(hi - lo + 1);
    for (unsigned i = 0; i + lo <= hi; ++i) out.set(i, get(lo + i));
    return out;
  }

  static BitArray concat(const std::vector<BitArray>& parts) {
    // parts[0] lands in the most significant bits
    unsigned total = 0;
    for (const auto& p : parts) total += p.width();
    BitArray out(total);
    unsigned pos = total;
    for (const auto& p : parts) {
      pos -= p.width();
      for (unsigned i = 0; i < p.width(); ++i) out.set(pos + i, p.get(i));
    }
    return out;
  }

 private:
  std::vector<bool> bits_;
};

// ---- random expression generator (solver and eval property tests) ----

struct ExprGen {
  std::mt19937_64 rng;
  std::vector<std::pair<std::string, unsigned>> vars;  // name, width

  explicit ExprGen(uint64_t seed) : rng(seed) {}

  uint64_t pick(uint64_t n) { return rng() % n; }

  coverif::bv::ExprRef leaf(unsigned width) {
    using namespace coverif::bv;
    if (!vars.empty() && pick(2) == 0) {
      const auto& [n, w] = vars[pick(vars.size())];
      ExprRef v = var(n, 1, w);
      return fit(v, width);
    }
    return constant(rng() & width_mask(width), width);
  }

  coverif::bv::ExprRef gen(unsigned width, unsigned depth) {
    using namespace coverif::bv;
    if (depth == 0) return leaf(width);
    switch (pick(14)) {
      case 0: return bv_not(gen(width, depth - 1));
      case 1: return bv_and(gen(width, depth - 1), gen(width, depth - 1));
      case 2: return bv_or(gen(width, depth - 1), gen(width, depth - 1));
      case 3: return bv_xor(gen(width, depth - 1), gen(width, depth - 1));
      case 4: return add(gen(width, depth - 1), gen(width, depth - 1));
      case 5: return sub(gen(width, depth - 1), gen(width, depth - 1));
      case 6: return mul(gen(width, depth - 1), gen(width, depth - 1));
      case 7: return shl(gen(width, depth - 1), gen(width, depth - 1));
      case 8: return lshr(gen(width, depth - 1), gen(width, depth - 1));
      case 9: return neg(gen(width, depth - 1));
      case 10:
        return ite(gen(1, depth - 1), gen(width, depth - 1), gen(width, depth - 1));
      case 11: {
        unsigned inner = width + 1 + static_cast<unsigned>(pick(3));
        if (inner > 64) inner = 64;
        if (inner <= width) return leaf(width);
        unsigned lo = static_cast<unsigned>(pick(inner - width + 1));
        return extract(gen(inner, depth - 1), lo + width - 1, lo);
      }
      case 12: {
        if (width < 2) return leaf(width);
        unsigned wa = 1 + static_cast<unsigned>(pick(width - 1));
        return concat(gen(wa, depth - 1), gen(width - wa, depth - 1));
      }
      default:
        if (width == 1) {
          unsigned w2 = 1 + static_cast<unsigned>(pick(6));
          switch (pick(4)) {
            case 0: return eq(gen(w2, depth - 1), gen(w2, depth - 1));
            case 1: return ult(gen(w2, depth - 1), gen(w2, depth - 1));
            case 2: return ule(gen(w2, depth - 1), gen(w2, depth - 1));
            default: return redxor(gen(w2, depth - 1));
          }
        }
        return zext(gen(1 + static_cast<unsigned>(pick(width)), depth - 1), width);
    }
  }
};

// ---- engine helpers ----

inline coverif::harness::ComposedModel load_bundled(const std::string& design_file,
                                                    const std::string& top,
                                                    const std::string& fw_file) {
  auto design = coverif::load_design_files({design_path(design_file)}, top);
  return coverif::load_model(design, design_path(fw_file));
}

// The reset/m/t branching fragment as a raw program: m and t start
// unconstrained, so the first writes create the _2 versions as in the
// monolithic constraint listing.
inline coverif::ir::Program mt_fragment(coverif::bv::ExprRef final_assert_cond,
                                        const std::string& label) {
  using namespace coverif::bv;
  using namespace coverif::ir;
  Program p;
  p.var_widths = {{"reset", 8}, {"c", 8}, {"d", 8}, {"m", 8}, {"t", 8}};
  auto r = var("reset", 0, 8);
  auto c = var("c", 0, 8);
  auto d = var("d", 0, 8);
  p.stmts = {
      mk_havoc("reset", 8),
      mk_havoc("c", 8),
      mk_havoc("d", 8),
      mk_if(lnot(eq(r, constant(0, 8))),
            {mk_assign("m", 8, constant(0, 8)), mk_assign("t", 8, constant(0, 8))},
            {mk_if(ult(d, c), {mk_assign("m", 8, add(c, d))},
                   {mk_assign("t", 8, shl(bv_and(c, constant(3, 8)), d))})}),
      mk_assert(label, final_assert_cond),
  };
  return p;
}

struct Benchmark {
  std::string name;
  std::string design;
  std::string top;
  std::string fw;
};

// The bundled benchmark suite (safe variants, injected bugs, feedback).
inline const std::vector<Benchmark>& benchmarks() {
  static const std::vector<Benchmark> list = {
      {"ex1_safe", "ex1.v", "top", "ex1_safe.fw"},
      {"ex1_unsafe", "ex1.v", "top", "ex1_unsafe.fw"},
      {"feedback_safe", "feedback.v", "top", "feedback_safe.fw"},
      {"feedback_unsafe", "feedback.v", "top", "feedback_unsafe.fw"},
      {"uart_loopback", "mini_uart.v", "mini_uart", "uart_loopback.fw"},
      {"uart_loopback_det", "mini_uart.v", "mini_uart", "uart_loopback_det.fw"},
      {"uart_bug_index", "mini_uart_bug_index.v", "mini_uart_bug_index",
       "uart_loopback.fw"},
      {"uart_bug_strobe", "mini_uart_bug_strobe.v", "mini_uart_bug_strobe",
       "uart_loopback.fw"},
  };
  return list;
}

}  // namespace testutil
