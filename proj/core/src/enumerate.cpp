// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "coverif/enumerate.hpp"

#include <algorithm>
#include <chrono>

#include "coverif/sim.hpp"

namespace coverif::sim {

namespace {
bool in_cluster(const synth::SwNetlistProgram& hw, const std::string& name) {
  for (const auto& c : hw.clusters)
    if (std::find(c.members.begin(), c.members.end(), name) != c.members.end())
      return true;
  return false;
}
}  // namespace

Verdict enumerate_verdict(const ir::Program& program,
                          const synth::SwNetlistProgram& hw, unsigned max_bits) {
  if (!program.acyclic())
    throw Error("enumeration requires an unwound (acyclic) program");
  auto t0 = std::chrono::steady_clock::now();

  struct Site {
    size_t pc;
    unsigned width;
  };
  std::vector<Site> sites;
  unsigned total_bits = 0;
  auto instrs = ir::flatten(program);
  for (size_t i = 0; i < instrs.size(); ++i) {
    if (instrs[i].kind != ir::InstrKind::Havoc) continue;
    if (in_cluster(hw, instrs[i].lhs)) continue;  // solved, not enumerated
    sites.push_back(Site{i, instrs[i].width});
    total_bits += instrs[i].width;
  }
  if (total_bits > max_bits)
    throw Error("enumeration infeasible: " + std::to_string(total_bits) +
                " nondeterministic input bits exceed the limit of " +
                std::to_string(max_bits));

  Verdict v;
  uint64_t combos = uint64_t{1} << total_bits;
  for (uint64_t counter = 0; counter < combos; ++counter) {
    // spread the counter bits over the sites
    std::map<size_t, uint64_t> values;
    unsigned at = 0;
    for (const auto& s : sites) {
      values[s.pc] = (counter >> at) & bv::width_mask(s.width);
      at += s.width;
    }
    SiteSource source(std::move(values));
    SimOptions opts;
    opts.strict = false;
    opts.hw = &hw;
    SimResult r = simulate(program, source, opts);
    if (r.vacuous) continue;
    ++v.stats.completed_paths;
    if (r.violated) {
      v.safe = false;
      Trace t;
      t.violated_assert = *r.violated;
      t.violation_cycle = r.violation_cycle;
      t.havocs = r.consumed;
      v.trace = std::move(t);
      v.stats.total_time_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
              .count();
      return v;
    }
  }
  v.safe = true;
  v.stats.total_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  return v;
}

}  // namespace coverif::sim
