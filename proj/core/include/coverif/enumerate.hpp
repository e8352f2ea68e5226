// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "coverif/ir.hpp"
#include "coverif/synth.hpp"
#include "coverif/verdict.hpp"

namespace coverif::sim {

// Exhaustive concrete enumeration over every havoc site of the unwound
// program (combinational feedback signals are solved from their equations
// rather than enumerated). The testing oracle behind the engines: refuses
// to run when the total nondeterministic input width exceeds max_bits.
Verdict enumerate_verdict(const ir::Program& program,
                          const synth::SwNetlistProgram& hw,
                          unsigned max_bits = 20);

}  // namespace coverif::sim
