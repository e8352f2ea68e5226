// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "coverif/compose.hpp"
#include "coverif/elaborate.hpp"
#include "coverif/symex.hpp"
#include "coverif/verdict.hpp"

namespace coverif {

enum class EngineKind { Symex, Mono, Enumerate };

struct VerifyOptions {
  EngineKind engine = EngineKind::Symex;
  symex::Mode mode = symex::Mode::PartialIncremental;
  bool prune = true;
  bool slice = true;
  unsigned unwind = 1;
  std::string dump_dimacs;   // monolithic engine: write the final CNF
  unsigned enum_max_bits = 20;
};

struct VerifyResult {
  Verdict verdict;
  std::vector<std::string> warnings;
  ir::Program unwound;  // unsliced program, counterexamples replay here
  size_t sliced_stmts = 0;
  size_t original_stmts = 0;
};

// unwind -> slice -> engine -> replay-validate counterexamples.
VerifyResult verify_model(const harness::ComposedModel& model,
                          const VerifyOptions& opts);

// Front-door loaders shared by the command line and the test suites.
rtl::ElaboratedDesign load_design_files(const std::vector<std::string>& paths,
                                        const std::string& top);
harness::ComposedModel load_model(const rtl::ElaboratedDesign& design,
                                  const std::string& fw_path);
harness::ComposedModel load_model_text(const std::string& verilog_text,
                                       const std::string& top,
                                       const std::string& fw_text);

}  // namespace coverif
