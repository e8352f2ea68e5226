// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "coverif/elaborate.hpp"
#include "coverif/ir.hpp"

namespace coverif::synth {

// One combinational driving equation: lhs is a hierarchical signal name,
// rhs reads signals at version 0. Owner is the instance-tree index the
// equation belongs to (port-binding equalities belong to the child they
// wire up).
struct CombEquation {
  std::string lhs;
  bv::ExprRef rhs;
  int owner = 0;
  bool from_binding = false;
};

struct CombDepGraph {
  std::vector<CombEquation> equations;
  // Signal-level view. Nodes cover combinational signals plus the inputs
  // and register outputs they read; edges point from a read signal to the
  // signal whose equation reads it.
  std::vector<std::string> nodes;  // topological order where defined
  std::vector<std::pair<std::string, std::string>> edges;
  // Signal-level SCCs over combinationally driven signals, topologically
  // ordered; singletons for acyclic logic.
  std::vector<std::vector<std::string>> sccs;
  // Equation groups after instance-level clustering. A group is encoded
  // with havoc+assume when instances exchange combinational values in a
  // cycle (size > 1 cluster SCC) or when its signal graph is cyclic.
  struct Group {
    std::vector<size_t> equation_indices;
    bool feedback = false;    // needs the havoc+assume encoding
    bool solvable = true;     // signal-level acyclic (orderable for simulation)
    std::vector<size_t> solve_order;  // equation indices, topological
  };
  std::vector<Group> groups;  // topologically ordered across groups
};

struct SwNetlistProgram {
  std::string top;
  std::string clock;  // empty for purely combinational designs
  std::vector<std::pair<std::string, unsigned>> state_vars;  // registers
  std::vector<std::pair<std::string, unsigned>> inputs;      // havocked per cycle
  std::vector<std::pair<std::string, unsigned>> outputs;
  std::vector<ir::StmtPtr> init;  // zero/constant initialization
  std::vector<ir::StmtPtr> step;  // one clock cycle of the whole design
  bv::ExprRef comb_constraint;    // conjunction over all feedback groups, or null
  // Feedback groups, for the concrete interpreter and the enumeration
  // oracle: members are havocked, equations define them.
  struct Cluster {
    std::vector<std::string> members;
    std::vector<std::pair<std::string, bv::ExprRef>> equations;
    bool solvable = true;
    std::vector<std::pair<std::string, bv::ExprRef>> solve_order;
  };
  std::vector<Cluster> clusters;
  // Labels registered later by the harness (assert statements pass through
  // composition); synthesis leaves this empty.
  std::vector<std::pair<std::string, bv::ExprRef>> asserts;
  std::map<std::string, unsigned> var_widths;  // signals and shadow copies
};

CombDepGraph build_comb_graph(const rtl::ElaboratedDesign& design);

// Translate the elaborated design into the sequential one-cycle program:
// shadow captures, dependency-ordered combinational assigns, clocked
// bodies with shadow reads, and havoc+assume feedback groups.
SwNetlistProgram synthesize(const rtl::ElaboratedDesign& design);

// Deterministic C rendering of the program (state struct, initial_block,
// step function, main with the nondeterministic input loop).
std::string emit_c(const SwNetlistProgram& program);

nlohmann::json program_to_json(const SwNetlistProgram& program);

}  // namespace coverif::synth
