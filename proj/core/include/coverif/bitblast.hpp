// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "coverif/bv.hpp"
#include "coverif/sat.hpp"

namespace coverif::blast {

// Tseitin encoding of bit-vector expressions onto an incremental SAT
// instance: ripple-carry adders, shift-add multiplication, barrel-mux
// shifters, per-bit muxes for ite and subtract-borrow comparisons. The
// structural cache lives per instance; instances die on backtrack in the
// partial-incremental mode.
class CnfInstance {
 public:
  explicit CnfInstance(unsigned max_width = 64);

  // Encode a width-1 expression; side clauses land in the instance and the
  // returned literal is equivalent to the expression.
  sat::Lit bitblast(const bv::ExprRef& e);

  void assert_true(const bv::ExprRef& e);              // unit clause
  void assert_implies(sat::Lit guard, const bv::ExprRef& e);  // guard => e
  sat::Lit fresh_lit();                                // free activation literal

  sat::Status solve(const std::vector<sat::Lit>& assumptions = {});

  // Model access after Sat: value of a registered variable; variables the
  // encoding never touched read as 0.
  uint64_t model_value(const std::string& name, unsigned version, unsigned width);
  bool model_lit(sat::Lit l) const { return solver_.model_value(l); }

  // Force allocation of SAT variables for a program variable so SAT models
  // always cover it (trace extraction relies on this).
  void touch_var(const std::string& name, unsigned version, unsigned width);

  // All registered program variables with their model values.
  std::vector<std::tuple<std::string, unsigned, uint64_t>> model_vars();

  void write_dimacs(std::ostream& os) const { solver_.write_dimacs(os); }
  sat::Solver& solver() { return solver_; }

  size_t clause_count() const { return solver_.num_clauses(); }

 private:
  sat::Solver solver_;
  unsigned max_width_;
  sat::Lit true_lit_;

  struct KeyHash {
    size_t operator()(const bv::ExprRef& e) const { return e->hash; }
  };
  struct KeyEq {
    bool operator()(const bv::ExprRef& a, const bv::ExprRef& b) const {
      return bv::struct_eq(a, b);
    }
  };
  std::unordered_map<bv::ExprRef, std::vector<sat::Lit>, KeyHash, KeyEq> cache_;
  std::map<std::pair<std::string, unsigned>, std::vector<sat::Lit>> vars_;

  std::vector<sat::Lit> blast_bits(const bv::ExprRef& e);
  std::vector<sat::Lit>& var_bits(const std::string& name, unsigned version,
                                  unsigned width);

  sat::Lit lit_false() const { return ~true_lit_; }
  sat::Lit fresh();
  void clause(std::vector<sat::Lit> c) { solver_.add_clause(std::move(c)); }

  sat::Lit gate_and(sat::Lit a, sat::Lit b);
  sat::Lit gate_or(sat::Lit a, sat::Lit b);
  sat::Lit gate_xor(sat::Lit a, sat::Lit b);
  sat::Lit gate_mux(sat::Lit sel, sat::Lit t, sat::Lit e);
  std::vector<sat::Lit> ripple_add(const std::vector<sat::Lit>& a,
                                   const std::vector<sat::Lit>& b, sat::Lit carry_in);
  sat::Lit borrow_ult(const std::vector<sat::Lit>& a, const std::vector<sat::Lit>& b);
};

}  // namespace coverif::blast
