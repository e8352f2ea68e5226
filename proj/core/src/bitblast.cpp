// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "coverif/bitblast.hpp"

#include <algorithm>
#include <cstdlib>

namespace coverif::blast {

using sat::Lit;

CnfInstance::CnfInstance(unsigned max_width) : max_width_(max_width) {
  true_lit_ = sat::mk_lit(solver_.new_var());
  clause({true_lit_});
}

Lit CnfInstance::fresh() { return sat::mk_lit(solver_.new_var()); }
Lit CnfInstance::fresh_lit() { return fresh(); }

std::vector<Lit>& CnfInstance::var_bits(const std::string& name, unsigned version,
                                        unsigned width) {
  auto key = std::make_pair(name, version);
  auto it = vars_.find(key);
  if (it != vars_.end()) return it->second;
  std::vector<Lit> bits;
  bits.reserve(width);
  for (unsigned i = 0; i < width; ++i) bits.push_back(fresh());
  return vars_.emplace(key, std::move(bits)).first->second;
}

void CnfInstance::touch_var(const std::string& name, unsigned version, unsigned width) {
  var_bits(name, version, width);
}

std::vector<std::tuple<std::string, unsigned, uint64_t>> CnfInstance::model_vars() {
  std::vector<std::tuple<std::string, unsigned, uint64_t>> out;
  for (const auto& [key, bits] : vars_) {
    uint64_t v = 0;
    for (size_t i = 0; i < bits.size(); ++i)
      if (solver_.model_value(bits[i])) v |= uint64_t{1} << i;
    out.emplace_back(key.first, key.second, v);
  }
  return out;
}

uint64_t CnfInstance::model_value(const std::string& name, unsigned version,
                                  unsigned width) {
  auto it = vars_.find(std::make_pair(name, version));
  if (it == vars_.end()) return 0;
  uint64_t v = 0;
  for (unsigned i = 0; i < it->second.size() && i < width; ++i)
    if (solver_.model_value(it->second[i])) v |= uint64_t{1} << i;
  return v;
}

// ---- gates ----

Lit CnfInstance::gate_and(Lit a, Lit b) {
  if (a == lit_false() || b == lit_false()) return lit_false();
  if (a == true_lit_) return b;
  if (b == true_lit_) return a;
  if (a == b) return a;
  if (a == ~b) return lit_false();
  Lit g = fresh();
  clause({~g, a});
  clause({~g, b});
  clause({g, ~a, ~b});
  return g;
}

Lit CnfInstance::gate_or(Lit a, Lit b) { return ~gate_and(~a, ~b); }

Lit CnfInstance::gate_xor(Lit a, Lit b) {
  if (a == true_lit_) return ~b;
  if (b == true_lit_) return ~a;
  if (a == lit_false()) return b;
  if (b == lit_false()) return a;
  if (a == b) return lit_false();
  if (a == ~b) return true_lit_;
  Lit g = fresh();
  clause({~g, a, b});
  clause({~g, ~a, ~b});
  clause({g, ~a, b});
  clause({g, a, ~b});
  return g;
}

Lit CnfInstance::gate_mux(Lit sel, Lit t, Lit e) {
  if (sel == true_lit_) return t;
  if (sel == lit_false()) return e;
  if (t == e) return t;
  Lit g = fresh();
  clause({~g, ~sel, t});
  clause({~g, sel, e});
  clause({g, ~sel, ~t});
  clause({g, sel, ~e});
  return g;
}

std::vector<Lit> CnfInstance::ripple_add(const std::vector<Lit>& a,
                                         const std::vector<Lit>& b, Lit carry_in) {
  std::vector<Lit> sum(a.size(), lit_false());
  Lit carry = carry_in;
  for (size_t i = 0; i < a.size(); ++i) {
    Lit axb = gate_xor(a[i], b[i]);
    sum[i] = gate_xor(axb, carry);
    // majority(a, b, carry)
    Lit ab = gate_and(a[i], b[i]);
    Lit ac = gate_and(axb, carry);
    carry = gate_or(ab, ac);
  }
  return sum;
}

Lit CnfInstance::borrow_ult(const std::vector<Lit>& a, const std::vector<Lit>& b) {
  // borrow chain of a - b; final borrow <=> a < b
  Lit borrow = lit_false();
  for (size_t i = 0; i < a.size(); ++i) {
    Lit eq_bit = ~gate_xor(a[i], b[i]);
    Lit lt_bit = gate_and(~a[i], b[i]);
    borrow = gate_or(lt_bit, gate_and(eq_bit, borrow));
  }
  return borrow;
}

// ---- expression encoding ----

std::vector<Lit> CnfInstance::blast_bits(const bv::ExprRef& e) {
  if (e->width > max_width_)
    throw Error("bit-blasting width " + std::to_string(e->width) +
                " exceeds the configured maximum of " + std::to_string(max_width_));
  if (auto it = cache_.find(e); it != cache_.end()) return it->second;

  using bv::Op;
  std::vector<Lit> out;
  auto bits_of_const = [&](uint64_t v, unsigned w) {
    std::vector<Lit> bits(w);
    for (unsigned i = 0; i < w; ++i)
      bits[i] = (v >> i) & 1 ? true_lit_ : lit_false();
    return bits;
  };

  switch (e->op) {
    case Op::Var:
      out = var_bits(e->name, e->version, e->width);
      break;
    case Op::Const:
      out = bits_of_const(e->value, e->width);
      break;
    case Op::Not: {
      auto a = blast_bits(e->a);
      for (Lit l : a) out.push_back(~l);
      break;
    }
    case Op::And:
    case Op::Or:
    case Op::Xor: {
      auto a = blast_bits(e->a);
      auto b = blast_bits(e->b);
      for (unsigned i = 0; i < e->width; ++i)
        out.push_back(e->op == Op::And   ? gate_and(a[i], b[i])
                      : e->op == Op::Or  ? gate_or(a[i], b[i])
                                         : gate_xor(a[i], b[i]));
      break;
    }
    case Op::Neg: {
      auto a = blast_bits(e->a);
      std::vector<Lit> na;
      for (Lit l : a) na.push_back(~l);
      out = ripple_add(na, bits_of_const(0, e->width), true_lit_);
      break;
    }
    case Op::Add:
      out = ripple_add(blast_bits(e->a), blast_bits(e->b), lit_false());
      break;
    case Op::Sub: {
      auto b = blast_bits(e->b);
      std::vector<Lit> nb;
      for (Lit l : b) nb.push_back(~l);
      out = ripple_add(blast_bits(e->a), nb, true_lit_);
      break;
    }
    case Op::Mul: {
      auto a = blast_bits(e->a);
      auto b = blast_bits(e->b);
      std::vector<Lit> acc = bits_of_const(0, e->width);
      for (unsigned i = 0; i < e->width; ++i) {
        // (a << i) gated by b[i]
        std::vector<Lit> addend(e->width, lit_false());
        for (unsigned j = i; j < e->width; ++j)
          addend[j] = gate_and(a[j - i], b[i]);
        acc = ripple_add(acc, addend, lit_false());
      }
      out = acc;
      break;
    }
    case Op::Shl:
    case Op::Lshr: {
      auto a = blast_bits(e->a);
      auto amt = blast_bits(e->b);
      unsigned w = e->width;
      std::vector<Lit> cur = a;
      // barrel stages over the amount bits that stay inside the width
      for (unsigned j = 0; j < amt.size() && (uint64_t{1} << j) < w; ++j) {
        unsigned dist = 1u << j;
        std::vector<Lit> next(w);
        for (unsigned i = 0; i < w; ++i) {
          Lit shifted;
          if (e->op == Op::Shl)
            shifted = i >= dist ? cur[i - dist] : lit_false();
          else
            shifted = i + dist < w ? cur[i + dist] : lit_false();
          next[i] = gate_mux(amt[j], shifted, cur[i]);
        }
        cur = next;
      }
      // any amount bit at or above the width zeroes the result
      Lit big = lit_false();
      for (unsigned j = 0; j < amt.size(); ++j)
        if ((uint64_t{1} << j) >= w) big = gate_or(big, amt[j]);
      for (unsigned i = 0; i < w; ++i) cur[i] = gate_and(cur[i], ~big);
      out = cur;
      break;
    }
    case Op::Eq: {
      auto a = blast_bits(e->a);
      auto b = blast_bits(e->b);
      Lit acc = true_lit_;
      for (size_t i = 0; i < a.size(); ++i)
        acc = gate_and(acc, ~gate_xor(a[i], b[i]));
      out = {acc};
      break;
    }
    case Op::Ult:
      out = {borrow_ult(blast_bits(e->a), blast_bits(e->b))};
      break;
    case Op::Ule:
      out = {~borrow_ult(blast_bits(e->b), blast_bits(e->a))};
      break;
    case Op::Slt: {
      auto a = blast_bits(e->a);
      auto b = blast_bits(e->b);
      Lit sa = a.back(), sb = b.back();
      Lit u = borrow_ult(a, b);
      // sa & !sb  |  (sa == sb) & ult
      Lit neg_pos = gate_and(sa, ~sb);
      Lit same = ~gate_xor(sa, sb);
      out = {gate_or(neg_pos, gate_and(same, u))};
      break;
    }
    case Op::Ite: {
      Lit sel = bitblast(e->a);
      auto t = blast_bits(e->b);
      auto f = blast_bits(e->c);
      for (unsigned i = 0; i < e->width; ++i)
        out.push_back(gate_mux(sel, t[i], f[i]));
      break;
    }
    case Op::Extract: {
      auto a = blast_bits(e->a);
      for (unsigned i = e->lo; i <= e->hi; ++i) out.push_back(a[i]);
      break;
    }
    case Op::Concat: {
      auto a = blast_bits(e->a);
      auto b = blast_bits(e->b);
      out = b;  // b holds the least significant bits
      out.insert(out.end(), a.begin(), a.end());
      break;
    }
    case Op::Zext: {
      out = blast_bits(e->a);
      while (out.size() < e->width) out.push_back(lit_false());
      break;
    }
    case Op::Sext: {
      out = blast_bits(e->a);
      Lit s = out.back();
      while (out.size() < e->width) out.push_back(s);
      break;
    }
    case Op::RedOr: {
      auto a = blast_bits(e->a);
      Lit acc = lit_false();
      for (Lit l : a) acc = gate_or(acc, l);
      out = {acc};
      break;
    }
    case Op::RedAnd: {
      auto a = blast_bits(e->a);
      Lit acc = true_lit_;
      for (Lit l : a) acc = gate_and(acc, l);
      out = {acc};
      break;
    }
    case Op::RedXor: {
      auto a = blast_bits(e->a);
      Lit acc = lit_false();
      for (Lit l : a) acc = gate_xor(acc, l);
      out = {acc};
      break;
    }
  }
  cache_.emplace(e, out);
  return out;
}

Lit CnfInstance::bitblast(const bv::ExprRef& e) {
  if (e->width != 1) throw Error("bitblast: expression must have width 1");
  return blast_bits(e)[0];
}

void CnfInstance::assert_true(const bv::ExprRef& e) { clause({bitblast(e)}); }

void CnfInstance::assert_implies(Lit guard, const bv::ExprRef& e) {
  clause({~guard, bitblast(e)});
}

sat::Status CnfInstance::solve(const std::vector<Lit>& assumptions) {
  const char* env = std::getenv("COVERIF_SOLVER_TIMEOUT_MS");
  if (env && *env) solver_.set_time_budget_ms(std::strtoull(env, nullptr, 10));
  return solver_.solve(assumptions);
}

}  // namespace coverif::blast
