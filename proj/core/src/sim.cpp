// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "coverif/sim.hpp"

#include <algorithm>

namespace coverif::sim {

TraceSource::TraceSource(const Trace& t) {
  for (const auto& h : t.havocs)
    queues_[{h.cycle, h.name}].push_back(h.value);
}

std::optional<uint64_t> TraceSource::next(size_t, int cycle, const std::string& name) {
  auto it = queues_.find({cycle, name});
  if (it == queues_.end() || it->second.empty()) return std::nullopt;
  uint64_t v = it->second.front();
  it->second.pop_front();
  return v;
}

namespace {

// Evaluate the defining equations of the feedback cluster containing
// `name` against the current environment (signal-level acyclic clusters
// only). Idempotent: re-solving with unchanged inputs yields the same
// values.
bool solve_cluster(const synth::SwNetlistProgram& hw, const std::string& name,
                   bv::Env& env) {
  for (const auto& c : hw.clusters) {
    if (std::find(c.members.begin(), c.members.end(), name) == c.members.end())
      continue;
    if (!c.solvable) return false;
    for (const auto& [lhs, rhs] : c.solve_order)
      env.set(lhs, 0, bv::eval(rhs, env));
    return true;
  }
  return false;
}

}  // namespace

SimResult simulate(const ir::Program& program, HavocSource& source,
                   const SimOptions& opts) {
  if (!program.acyclic())
    throw Error("simulation requires an unwound (acyclic) program");
  SimResult r;

  // all variables start at zero; init statements overwrite
  for (const auto& [name, w] : program.var_widths) r.env.set(name, 0, 0);

  auto instrs = ir::flatten(program);
  int last_cycle = -1;

  auto snapshot = [&]() {
    std::map<std::string, uint64_t> snap;
    for (const auto& n : opts.snapshot_vars)
      if (r.env.has(n, 0)) snap[n] = r.env.get(n, 0);
    r.snapshots.push_back(std::move(snap));
  };

  size_t pc = 0;
  for (;;) {
    const ir::Instr& in = instrs[pc];
    switch (in.kind) {
      case ir::InstrKind::Assign:
        r.env.set(in.lhs, 0, bv::eval(in.expr, r.env));
        ++pc;
        break;
      case ir::InstrKind::Havoc: {
        std::optional<uint64_t> v = source.next(pc, in.cycle, in.lhs);
        if (!v.has_value() && opts.hw && solve_cluster(*opts.hw, in.lhs, r.env)) {
          // value computed by the cluster equations; record for the trace
          r.consumed.push_back(
              TraceHavoc{in.cycle, in.lhs, 0, r.env.get(in.lhs, 0)});
          ++pc;
          break;
        }
        if (!v.has_value()) {
          if (opts.strict)
            throw Error("trace provides no value for havoc of '" + in.lhs +
                        "' in cycle " + std::to_string(in.cycle));
          v = 0;
          ++r.defaulted;
        }
        uint64_t value = *v & bv::width_mask(in.width);
        r.env.set(in.lhs, 0, value);
        r.consumed.push_back(TraceHavoc{in.cycle, in.lhs, 0, value});
        ++pc;
        break;
      }
      case ir::InstrKind::Assume:
        if (!bv::eval(in.expr, r.env)) {
          r.vacuous = true;
          r.vacuous_cycle = in.cycle;
          return r;
        }
        ++pc;
        break;
      case ir::InstrKind::Assert:
        if (!bv::eval(in.expr, r.env)) {
          r.violated = in.label;
          r.violation_cycle = in.cycle;
          return r;
        }
        ++pc;
        break;
      case ir::InstrKind::Branch:
        pc = bv::eval(in.expr, r.env) ? pc + 1 : in.target;
        break;
      case ir::InstrKind::Goto:
        pc = in.target;
        break;
      case ir::InstrKind::StepMark:
        last_cycle = in.cycle;
        snapshot();
        ++pc;
        break;
      case ir::InstrKind::End:
        (void)last_cycle;
        return r;
    }
  }
}

}  // namespace coverif::sim
