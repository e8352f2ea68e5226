// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "coverif/verify.hpp"

#include <algorithm>
#include <cmath>

#include "coverif/bmc.hpp"
#include "coverif/enumerate.hpp"
#include "coverif/rtl_parse.hpp"
#include "coverif/sim.hpp"
#include "coverif/slice.hpp"
#include "coverif/unwind.hpp"

namespace coverif {

using nlohmann::json;

// ---- trace / stats JSON ----

json Trace::to_json() const {
  json j;
  j["violated_assert"] = violated_assert;
  j["violation_cycle"] = violation_cycle;
  int max_cycle = -1;
  for (const auto& h : havocs) max_cycle = std::max(max_cycle, h.cycle);
  json cycles = json::array();
  for (int c = 0; c <= max_cycle; ++c) {
    json jc;
    jc["cycle"] = c;
    json inputs = json::object();
    json ordered = json::array();
    for (const auto& h : havocs) {
      if (h.cycle != c) continue;
      inputs[h.name] = h.value;
      ordered.push_back(json{{"name", h.name}, {"value", h.value}});
    }
    jc["inputs"] = inputs;
    jc["havocs"] = ordered;
    cycles.push_back(jc);
  }
  j["cycles"] = cycles;
  if (!model.empty()) {
    json m = json::object();
    for (const auto& [name, value] : model) m[name] = value;
    j["model"] = m;
  }
  return j;
}

Trace Trace::from_json(const json& j) {
  Trace t;
  t.violated_assert = j.value("violated_assert", std::string{});
  t.violation_cycle = j.value("violation_cycle", -1);
  for (const auto& jc : j.at("cycles")) {
    int cycle = jc.at("cycle").get<int>();
    if (jc.contains("havocs")) {
      for (const auto& h : jc.at("havocs"))
        t.havocs.push_back(TraceHavoc{cycle, h.at("name").get<std::string>(), 0,
                                      h.at("value").get<uint64_t>()});
    } else {
      for (const auto& [name, value] : jc.at("inputs").items())
        t.havocs.push_back(TraceHavoc{cycle, name, 0, value.get<uint64_t>()});
    }
  }
  return t;
}

json ExplorationStats::to_json() const {
  json j;
  j["branch_attempts"] = branch_attempts;
  j["pruned"] = pruned;
  j["completed_paths"] = completed_paths;
  j["pruning_percent"] = std::round(pruning_percent() * 100.0) / 100.0;
  j["solver_calls"] = solver_calls;
  j["solver_instances"] = solver_instances;
  j["stmts_executed"] = stmts_executed;
  j["formula_equalities"] = formula_equalities;
  j["solve_time_ms"] = std::round(solve_time_ms * 100.0) / 100.0;
  j["total_time_ms"] = std::round(total_time_ms * 100.0) / 100.0;
  return j;
}

// ---- pipeline ----

VerifyResult verify_model(const harness::ComposedModel& model,
                          const VerifyOptions& opts) {
  VerifyResult r;
  r.warnings = model.warnings;

  r.unwound = harness::unwind(model.program, opts.unwind, &r.warnings);
  r.original_stmts = r.unwound.stmt_count();

  ir::Program target = r.unwound;
  if (opts.slice) {
    slice::SliceResult sr = slice::slice(r.unwound);
    if (sr.warned_no_asserts)
      r.warnings.push_back("no assertions registered: slicing is the identity");
    target = std::move(sr.program);
  }
  r.sliced_stmts = target.stmt_count();

  switch (opts.engine) {
    case EngineKind::Symex: {
      symex::Config cfg;
      cfg.mode = opts.mode;
      cfg.prune = opts.prune;
      r.verdict = symex::run(target, cfg);
      break;
    }
    case EngineKind::Mono: {
      bmc::SsaProgram ssa = bmc::encode_ssa(target);
      if (ssa.obligations.empty())
        r.warnings.push_back("no assertions registered: nothing to check");
      bmc::CheckOptions copts;
      copts.dump_dimacs_path = opts.dump_dimacs;
      r.verdict = bmc::check(ssa, copts);
      break;
    }
    case EngineKind::Enumerate:
      r.verdict = sim::enumerate_verdict(target, model.hw, opts.enum_max_bits);
      break;
  }

  // Counterexamples must replay: run the trace through the concrete
  // interpreter over the unsliced program and enrich it with per-cycle
  // register snapshots.
  if (!r.verdict.safe && r.verdict.trace) {
    sim::TraceSource source(*r.verdict.trace);
    sim::SimOptions sopts;
    sopts.hw = &model.hw;
    for (const auto& [n, w] : model.hw.state_vars) sopts.snapshot_vars.push_back(n);
    sim::SimResult replay = sim::simulate(r.unwound, source, sopts);
    if (!replay.violated)
      throw Error("internal: counterexample trace does not replay to a violation");
    if (*replay.violated != r.verdict.trace->violated_assert)
      throw Error("internal: counterexample replays to '" + *replay.violated +
                  "' instead of '" + r.verdict.trace->violated_assert + "'");
  }
  return r;
}

// ---- loaders ----

rtl::ElaboratedDesign load_design_files(const std::vector<std::string>& paths,
                                        const std::string& top) {
  return rtl::elaborate(rtl::parse_files(paths), top);
}

harness::ComposedModel load_model(const rtl::ElaboratedDesign& design,
                                  const std::string& fw_path) {
  synth::SwNetlistProgram hw = synth::synthesize(design);
  fw::FirmwareProgram firmware = fw::parse_fw_file(fw_path);
  return harness::compose(firmware, hw);
}

harness::ComposedModel load_model_text(const std::string& verilog_text,
                                       const std::string& top,
                                       const std::string& fw_text) {
  auto design = rtl::elaborate(rtl::parse_source(verilog_text), top);
  synth::SwNetlistProgram hw = synth::synthesize(design);
  fw::FirmwareProgram firmware = fw::parse_fw(fw_text);
  return harness::compose(firmware, hw);
}

}  // namespace coverif
