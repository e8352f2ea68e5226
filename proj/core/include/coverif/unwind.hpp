// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "coverif/ir.hpp"

namespace coverif::harness {

// Unwind the composed program to an acyclic statement list.
//
// Loops not nested inside another loop are harness loops: counted ones
// unroll min(trip, k) times with the condition specialized away; general
// ones replicate k guarded copies (flat when the guard is literally true,
// nested ifs otherwise). Nested loops must be counted and unroll fully.
// No unwinding assertion is added: behavior beyond k stays unexplored.
//
// Every statement of the result is a fresh clone tagged with its clock
// cycle (the number of step marks executed before it).
ir::Program unwind(const ir::Program& p, unsigned k,
                   std::vector<std::string>* warnings = nullptr);

}  // namespace coverif::harness
