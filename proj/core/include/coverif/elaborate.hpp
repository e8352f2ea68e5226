// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "coverif/rtl_ast.hpp"

namespace coverif::rtl {

struct SignalInfo {
  std::string name;  // hierarchical, e.g. top.a.q
  NetKind kind = NetKind::Wire;
  unsigned width = 1;
  bool is_input = false;   // primary input of the top module
  bool is_output = false;  // primary output of the top module
  bool is_clock = false;   // on the clock net; excluded from data logic
};

struct InstanceNode {
  std::string path;    // hierarchical path, e.g. top.a
  std::string module;  // module name instantiated here
  int parent = -1;     // index into the tree, -1 for the root
};

struct ElaboratedDesign {
  std::string top;
  // Width-annotated module copies, parameters folded into `params`.
  std::map<std::string, ModuleAst> modules;
  std::map<std::string, std::map<std::string, uint64_t>> params;
  std::vector<InstanceNode> instance_tree;  // DFS pre-order, [0] is the root
  std::vector<SignalInfo> signal_table;     // declaration-then-instance order
  std::map<std::string, size_t> signal_index;

  const SignalInfo& signal(const std::string& hier_name) const;
  const ModuleAst& module_of(const InstanceNode& n) const {
    return modules.at(n.module);
  }
};

// Resolve the hierarchy below `top`, substitute parameters, infer widths,
// and build the flattened signal table. Deterministic: identical inputs
// produce identical tables.
ElaboratedDesign elaborate(std::vector<ModuleAst> modules, const std::string& top);

// Fold a constant expression using a parameter environment (plus optional
// loop-variable bindings). Throws if the expression is not constant.
uint64_t fold_const(const ExprAst& e,
                    const std::map<std::string, uint64_t>& env);

}  // namespace coverif::rtl
