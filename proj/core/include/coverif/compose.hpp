// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <set>
#include <string>
#include <vector>

#include "coverif/fw.hpp"
#include "coverif/ir.hpp"
#include "coverif/synth.hpp"

namespace coverif::harness {

struct ComposedModel {
  ir::Program program;  // sequential composition; loops not yet unwound
  synth::SwNetlistProgram hw;
  std::vector<std::string> pinned_inputs;  // driven by set_input, never havocked
  std::vector<std::pair<std::string, unsigned>> havoc_inputs;  // per step()
  std::vector<std::string> warnings;
};

// Sequentially compose the firmware with the software netlist: firmware
// statements are inlined, each step() expands to havocs of the unpinned
// primary inputs followed by one cycle of the netlist, and assertions pass
// through with their labels.
ComposedModel compose(const fw::FirmwareProgram& firmware,
                      const synth::SwNetlistProgram& hw);

}  // namespace coverif::harness
