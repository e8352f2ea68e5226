// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include "coverif/diag.hpp"

namespace coverif::sat {

using Var = int;

// MiniSat-style literal encoding: 2*var for the positive literal,
// 2*var+1 for the negation.
struct Lit {
  int x = -2;

  bool operator==(const Lit&) const = default;
};

inline Lit mk_lit(Var v, bool neg = false) { return Lit{v + v + (neg ? 1 : 0)}; }
inline Lit operator~(Lit l) { return Lit{l.x ^ 1}; }
inline bool sign(Lit l) { return l.x & 1; }
inline Var var_of(Lit l) { return l.x >> 1; }
const Lit lit_undef{-2};

enum class Status { Sat, Unsat };

// Incremental CDCL solver: add clauses and variables at any point between
// solve calls, solve under assumptions, read the model after Sat. This is
// the embedded backend; external solvers with the same incremental
// interface can be dropped in behind the same signatures.
class Solver {
 public:
  Solver();

  Var new_var();
  int num_vars() const { return static_cast<int>(assigns_.size()); }

  // False when the clause is trivially unsatisfiable at level 0 together
  // with the current database (the instance stays usable; solve reports
  // Unsat).
  bool add_clause(std::vector<Lit> lits);

  Status solve(const std::vector<Lit>& assumptions = {});

  // Model access, valid after the last solve returned Sat.
  bool model_value(Lit l) const;
  bool model_value(Var v) const;

  // Resource limits. Conflict budget 0 means unlimited; wall budget in
  // milliseconds, 0 means none. Exceeding either throws SolverLimit.
  void set_conflict_budget(uint64_t conflicts) { conflict_budget_ = conflicts; }
  void set_time_budget_ms(uint64_t ms) { time_budget_ms_ = ms; }

  // Problem clauses (excluding learnt clauses) in DIMACS format.
  void write_dimacs(std::ostream& os) const;

  uint64_t conflicts() const { return conflicts_; }
  uint64_t decisions() const { return decisions_; }
  uint64_t propagations() const { return propagations_; }
  size_t num_clauses() const { return clauses_.size(); }

 private:
  enum lbool : uint8_t { kTrue, kFalse, kUndef };

  struct Clause {
    std::vector<Lit> lits;
    bool learnt = false;
  };

  std::vector<Clause> db_;             // problem + learnt clauses
  std::vector<int> clauses_;           // indices of problem clauses
  std::vector<std::vector<int>> watches_;  // literal index -> clause indices
  std::vector<lbool> assigns_;
  std::vector<uint8_t> polarity_;      // phase saving
  std::vector<double> activity_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  size_t qhead_ = 0;
  double var_inc_ = 1.0;
  bool ok_ = true;
  std::vector<uint8_t> model_;

  // order heap (max-activity)
  std::vector<Var> heap_;
  std::vector<int> heap_pos_;

  uint64_t conflicts_ = 0, decisions_ = 0, propagations_ = 0;
  uint64_t conflict_budget_ = 0;
  uint64_t time_budget_ms_ = 0;

  lbool value(Lit l) const {
    lbool v = assigns_[var_of(l)];
    if (v == kUndef) return kUndef;
    return (v == kTrue) != sign(l) ? kTrue : kFalse;
  }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  void enqueue(Lit l, int reason);
  int propagate();  // returns conflicting clause index or -1
  void analyze(int confl, std::vector<Lit>& learnt, int& bt_level);
  void backtrack(int level);
  void bump(Var v);
  void decay() { var_inc_ *= (1.0 / 0.95); }
  Var pick_branch();
  void heap_insert(Var v);
  Var heap_pop();
  void heap_up(int i);
  void heap_down(int i);
  bool heap_less(Var a, Var b) const { return activity_[a] > activity_[b]; }
  void attach(int ci);
  bool search_budget_exceeded(uint64_t start_ms) const;
};

}  // namespace coverif::sat
