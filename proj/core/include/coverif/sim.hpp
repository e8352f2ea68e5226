// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coverif/ir.hpp"
#include "coverif/synth.hpp"
#include "coverif/verdict.hpp"

namespace coverif::sim {

// Values for havoc statements during concrete execution. Sites are
// instruction indices in the flattened program; each site executes at most
// once per run (the program is acyclic).
class HavocSource {
 public:
  virtual ~HavocSource() = default;
  virtual std::optional<uint64_t> next(size_t site, int cycle, const std::string& name) = 0;
};

// Per-(cycle, name) queues built from a counterexample trace.
class TraceSource : public HavocSource {
 public:
  explicit TraceSource(const Trace& t);
  std::optional<uint64_t> next(size_t site, int cycle, const std::string& name) override;

 private:
  std::map<std::pair<int, std::string>, std::deque<uint64_t>> queues_;
};

// Fixed per-site assignments (used by the exhaustive enumeration oracle).
class SiteSource : public HavocSource {
 public:
  explicit SiteSource(std::map<size_t, uint64_t> values) : values_(std::move(values)) {}
  std::optional<uint64_t> next(size_t site, int, const std::string&) override {
    auto it = values_.find(site);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::map<size_t, uint64_t> values_;
};

struct SimOptions {
  // Error out when a havoc has no value; otherwise default to 0 (values
  // sliced away from a counterexample cannot influence its assertion).
  bool strict = false;
  // Combinational feedback signals solved from their defining equations
  // when the source has no value for them.
  const synth::SwNetlistProgram* hw = nullptr;
  // Names whose per-cycle values are recorded in the result (typically the
  // registers).
  std::vector<std::string> snapshot_vars;
};

struct SimResult {
  bool vacuous = false;  // an assume evaluated to false; run abandoned
  int vacuous_cycle = -1;
  std::optional<std::string> violated;  // first violated assertion label
  int violation_cycle = -1;
  bv::Env env;  // final environment
  std::vector<TraceHavoc> consumed;    // havoc values used, execution order
  std::vector<std::map<std::string, uint64_t>> snapshots;  // per executed cycle
  size_t defaulted = 0;  // havocs that fell back to 0
};

// Deterministic concrete execution of an acyclic program through the
// bit-vector evaluator. Halts at the first violated assertion; an assume
// with a false condition abandons the run as vacuous.
SimResult simulate(const ir::Program& program, HavocSource& source,
                   const SimOptions& opts = {});

}  // namespace coverif::sim
