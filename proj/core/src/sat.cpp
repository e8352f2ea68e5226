// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "coverif/sat.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>

namespace coverif::sat {

namespace {
uint64_t now_ms() {
  return static_cast<uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now().time_since_epoch())
          .count());
}

// Luby restart sequence
double luby(double y, int x) {
  int size, seq;
  for (size = 1, seq = 0; size < x + 1; seq++, size = 2 * size + 1) {
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    seq--;
    x = x % size;
  }
  double r = 1;
  for (int i = 0; i < seq; ++i) r *= y;
  return r;
}
}  // namespace

Solver::Solver() = default;

Var Solver::new_var() {
  Var v = static_cast<Var>(assigns_.size());
  assigns_.push_back(kUndef);
  polarity_.push_back(0);
  activity_.push_back(0.0);
  level_.push_back(0);
  reason_.push_back(-1);
  heap_pos_.push_back(-1);
  watches_.emplace_back();
  watches_.emplace_back();
  heap_insert(v);
  return v;
}

void Solver::attach(int ci) {
  const auto& c = db_[ci].lits;
  watches_[(~c[0]).x].push_back(ci);
  watches_[(~c[1]).x].push_back(ci);
}

bool Solver::add_clause(std::vector<Lit> lits) {
  if (!ok_) return false;
  if (decision_level() != 0)
    throw Error("internal: clauses must be added at decision level 0");
  // strip duplicates and satisfied/false literals
  std::sort(lits.begin(), lits.end(), [](Lit a, Lit b) { return a.x < b.x; });
  std::vector<Lit> out;
  Lit prev = lit_undef;
  for (Lit l : lits) {
    if (value(l) == kTrue || (prev.x >= 0 && l == ~prev)) return true;  // satisfied/tautology
    if (value(l) == kFalse || l == prev) continue;
    out.push_back(l);
    prev = l;
  }
  if (out.empty()) {
    ok_ = false;
    return false;
  }
  if (out.size() == 1) {
    enqueue(out[0], -1);
    if (propagate() != -1) {
      ok_ = false;
      return false;
    }
    return true;
  }
  int ci = static_cast<int>(db_.size());
  db_.push_back(Clause{std::move(out), false});
  clauses_.push_back(ci);
  attach(ci);
  return true;
}

void Solver::enqueue(Lit l, int reason) {
  Var v = var_of(l);
  assigns_[v] = sign(l) ? kFalse : kTrue;
  level_[v] = decision_level();
  reason_[v] = reason;
  trail_.push_back(l);
}

int Solver::propagate() {
  while (qhead_ < trail_.size()) {
    Lit p = trail_[qhead_++];
    ++propagations_;
    auto& ws = watches_[p.x];
    size_t i = 0, j = 0;
    while (i < ws.size()) {
      int ci = ws[i];
      auto& c = db_[ci].lits;
      // make sure the false literal is c[1]
      Lit false_lit = ~p;
      if (c[0] == false_lit) std::swap(c[0], c[1]);
      if (value(c[0]) == kTrue) {
        ws[j++] = ws[i++];
        continue;
      }
      // look for a new watch
      bool moved = false;
      for (size_t k = 2; k < c.size(); ++k) {
        if (value(c[k]) != kFalse) {
          std::swap(c[1], c[k]);
          watches_[(~c[1]).x].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) {
        ++i;
        continue;
      }
      // unit or conflict
      if (value(c[0]) == kFalse) {
        while (i < ws.size()) ws[j++] = ws[i++];
        ws.resize(j);
        return ci;
      }
      enqueue(c[0], ci);
      ws[j++] = ws[i++];
    }
    ws.resize(j);
  }
  return -1;
}

void Solver::bump(Var v) {
  activity_[v] += var_inc_;
  if (activity_[v] > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_pos_[v] >= 0) heap_up(heap_pos_[v]);
}

void Solver::analyze(int confl, std::vector<Lit>& learnt, int& bt_level) {
  learnt.clear();
  learnt.push_back(lit_undef);  // reserve slot for the asserting literal
  std::vector<uint8_t> seen(assigns_.size(), 0);
  int counter = 0;
  Lit p = lit_undef;
  size_t index = trail_.size();

  do {
    const auto& c = db_[confl].lits;
    for (size_t k = (p == lit_undef ? 0 : 1); k < c.size(); ++k) {
      Lit q = c[k];
      Var v = var_of(q);
      if (!seen[v] && level_[v] > 0) {
        seen[v] = 1;
        bump(v);
        if (level_[v] >= decision_level())
          ++counter;
        else
          learnt.push_back(q);
      }
    }
    // next literal to resolve on
    while (!seen[var_of(trail_[--index])]) {
    }
    p = trail_[index];
    confl = reason_[var_of(p)];
    seen[var_of(p)] = 0;
    --counter;
  } while (counter > 0);
  learnt[0] = ~p;

  bt_level = 0;
  if (learnt.size() > 1) {
    size_t max_i = 1;
    for (size_t i = 2; i < learnt.size(); ++i)
      if (level_[var_of(learnt[i])] > level_[var_of(learnt[max_i])]) max_i = i;
    std::swap(learnt[1], learnt[max_i]);
    bt_level = level_[var_of(learnt[1])];
  }
}

void Solver::backtrack(int lvl) {
  if (decision_level() <= lvl) return;
  for (size_t i = trail_.size(); i-- > static_cast<size_t>(trail_lim_[lvl]);) {
    Var v = var_of(trail_[i]);
    polarity_[v] = assigns_[v] == kTrue ? 0 : 1;
    assigns_[v] = kUndef;
    reason_[v] = -1;
    if (heap_pos_[v] < 0) heap_insert(v);
  }
  trail_.resize(trail_lim_[lvl]);
  trail_lim_.resize(lvl);
  qhead_ = trail_.size();
}

// ---- order heap ----

void Solver::heap_insert(Var v) {
  heap_pos_[v] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heap_up(heap_pos_[v]);
}

void Solver::heap_up(int i) {
  Var v = heap_[i];
  while (i > 0) {
    int parent = (i - 1) >> 1;
    if (!heap_less(v, heap_[parent])) break;
    heap_[i] = heap_[parent];
    heap_pos_[heap_[i]] = i;
    i = parent;
  }
  heap_[i] = v;
  heap_pos_[v] = i;
}

void Solver::heap_down(int i) {
  Var v = heap_[i];
  int n = static_cast<int>(heap_.size());
  for (;;) {
    int child = 2 * i + 1;
    if (child >= n) break;
    if (child + 1 < n && heap_less(heap_[child + 1], heap_[child])) ++child;
    if (!heap_less(heap_[child], v)) break;
    heap_[i] = heap_[child];
    heap_pos_[heap_[i]] = i;
    i = child;
  }
  heap_[i] = v;
  heap_pos_[v] = i;
}

Var Solver::heap_pop() {
  Var v = heap_[0];
  heap_[0] = heap_.back();
  heap_pos_[heap_[0]] = 0;
  heap_.pop_back();
  heap_pos_[v] = -1;
  if (!heap_.empty()) heap_down(0);
  return v;
}

Var Solver::pick_branch() {
  while (!heap_.empty()) {
    Var v = heap_pop();
    if (assigns_[v] == kUndef) return v;
  }
  return -1;
}

bool Solver::search_budget_exceeded(uint64_t start_ms) const {
  if (conflict_budget_ && conflicts_ >= conflict_budget_) return true;
  if (time_budget_ms_ && (conflicts_ & 0x3f) == 0 && now_ms() - start_ms > time_budget_ms_)
    return true;
  return false;
}

Status Solver::solve(const std::vector<Lit>& assumptions) {
  if (!ok_) return Status::Unsat;
  backtrack(0);
  if (propagate() != -1) {
    ok_ = false;
    return Status::Unsat;
  }

  const uint64_t start_ms = now_ms();
  const uint64_t conflicts_at_start = conflicts_;
  int restart_count = 0;
  uint64_t restart_limit = 100 * static_cast<uint64_t>(luby(2.0, restart_count));
  uint64_t conflicts_this_restart = 0;

  for (;;) {
    int confl = propagate();
    if (confl != -1) {
      ++conflicts_;
      ++conflicts_this_restart;
      if (decision_level() == 0) {
        backtrack(0);
        return Status::Unsat;
      }
      // A conflict while only assumption decisions are on the trail means
      // the assumption prefix is inconsistent with the clause database.
      if (static_cast<size_t>(decision_level()) <= assumptions.size()) {
        backtrack(0);
        return Status::Unsat;
      }
      std::vector<Lit> learnt;
      int bt;
      analyze(confl, learnt, bt);
      backtrack(bt);
      if (learnt.size() == 1) {
        if (value(learnt[0]) == kFalse) {
          ok_ = false;
          backtrack(0);
          return Status::Unsat;
        }
        if (value(learnt[0]) == kUndef) enqueue(learnt[0], -1);
      } else {
        int ci = static_cast<int>(db_.size());
        db_.push_back(Clause{learnt, true});
        attach(ci);
        if (value(learnt[0]) == kUndef) enqueue(learnt[0], ci);
      }
      decay();
      if (search_budget_exceeded(start_ms))
        throw SolverLimit("solver resource limit exceeded after " +
                          std::to_string(conflicts_ - conflicts_at_start) + " conflicts");
      if (conflicts_this_restart >= restart_limit) {
        conflicts_this_restart = 0;
        restart_limit = 100 * static_cast<uint64_t>(luby(2.0, ++restart_count));
        backtrack(static_cast<int>(std::min(assumptions.size(),
                                            static_cast<size_t>(decision_level()))));
      }
      continue;
    }

    // place assumptions first
    if (static_cast<size_t>(decision_level()) < assumptions.size()) {
      Lit a = assumptions[decision_level()];
      if (value(a) == kTrue) {
        trail_lim_.push_back(static_cast<int>(trail_.size()));  // dummy level
        continue;
      }
      if (value(a) == kFalse) {
        backtrack(0);
        return Status::Unsat;
      }
      trail_lim_.push_back(static_cast<int>(trail_.size()));
      enqueue(a, -1);
      continue;
    }

    Var next = pick_branch();
    if (next == -1) {
      // model found
      model_.assign(assigns_.size(), 0);
      for (size_t v = 0; v < assigns_.size(); ++v)
        model_[v] = assigns_[v] == kTrue ? 1 : 0;
      backtrack(0);
      return Status::Sat;
    }
    ++decisions_;
    trail_lim_.push_back(static_cast<int>(trail_.size()));
    enqueue(mk_lit(next, polarity_[next]), -1);
  }
}

bool Solver::model_value(Var v) const {
  return v >= 0 && static_cast<size_t>(v) < model_.size() && model_[v];
}

bool Solver::model_value(Lit l) const { return model_value(var_of(l)) != sign(l); }

void Solver::write_dimacs(std::ostream& os) const {
  os << "p cnf " << num_vars() << " " << clauses_.size() << "\n";
  for (int ci : clauses_) {
    for (Lit l : db_[ci].lits) os << (sign(l) ? -(var_of(l) + 1) : var_of(l) + 1) << " ";
    os << "0\n";
  }
}

}  // namespace coverif::sat
