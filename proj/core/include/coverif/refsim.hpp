// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "coverif/elaborate.hpp"

namespace coverif::sim {

// Event-free two-phase reference simulator over the elaborated design,
// independent of the software-netlist translation: per cycle it settles
// all combinational logic by sweeping to a fixpoint, samples every
// non-blocking right-hand side, and commits. Blocking assignments are
// visible to later reads within their own block only; cross-block reads
// see pre-cycle register values, matching the subset semantics.
class RefSim {
 public:
  explicit RefSim(const rtl::ElaboratedDesign& design);

  void reset();  // zero state, apply initial-block constants, settle
  void set_input(const std::string& name, uint64_t value);  // leaf or full name
  void step();   // one clock cycle
  void settle(); // combinational sweep only
  uint64_t get(const std::string& name) const;  // leaf or full name

  const std::map<std::string, uint64_t>& values() const { return vals_; }

 private:
  const rtl::ElaboratedDesign& d_;
  std::map<std::string, uint64_t> vals_;
  std::string resolve(const std::string& name) const;

  uint64_t eval(const rtl::ExprAst& e, int inst,
                const std::map<std::string, uint64_t>& overlay,
                const std::map<std::string, uint64_t>& loop_env) const;
  uint64_t apply_lvalue(const rtl::LValue& lv, int inst,
                        const std::map<std::string, uint64_t>& overlay,
                        const std::map<std::string, uint64_t>& loop_env,
                        uint64_t old_value, unsigned width, uint64_t value) const;
  void run_comb_block(const rtl::AlwaysBlock& blk, int inst,
                      std::map<std::string, uint64_t>& out);
  void exec_clocked(const rtl::StmtAst& s, int inst,
                    std::map<std::string, uint64_t>& overlay,
                    std::map<std::string, uint64_t>& commits,
                    std::map<std::string, uint64_t>& loop_env);
  bool sweep_once();
};

}  // namespace coverif::sim
