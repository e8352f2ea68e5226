// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coverif/diag.hpp"

namespace coverif::rtl {

enum class Tok {
  Ident,
  Number,   // bare decimal
  Sized,    // width'base literal, e.g. 3'b101
  Punct,    // single or multi character operator
  End,
};

struct Token {
  Tok kind;
  std::string text;       // identifier text or punctuation spelling
  uint64_t value = 0;     // Number / Sized
  unsigned width = 0;     // Sized
  SourceLoc loc;
};

// Tokenize Verilog-subset source. Rejects four-valued literals (x/z) with
// an unsupported-construct diagnostic.
std::vector<Token> lex_verilog(const std::string& text, const std::string& filename);

}  // namespace coverif::rtl
