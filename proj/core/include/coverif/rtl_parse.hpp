// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "coverif/rtl_ast.hpp"

namespace coverif::rtl {

// Parse one source text into module ASTs. Throws Error with file:line:col
// on syntax errors, unsupported constructs and duplicate module names.
std::vector<ModuleAst> parse_source(const std::string& text,
                                    const std::string& filename = "<input>");

// Convenience: read and parse one or more files.
std::vector<ModuleAst> parse_files(const std::vector<std::string>& paths);

}  // namespace coverif::rtl
