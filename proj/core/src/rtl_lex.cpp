// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "rtl_lex.hpp"

#include <cctype>

namespace coverif::rtl {

namespace {

struct Cursor {
  const std::string& s;
  const std::string& file;
  size_t i = 0;
  int line = 1;
  int col = 1;

  bool done() const { return i >= s.size(); }
  char peek(size_t k = 0) const { return i + k < s.size() ? s[i + k] : '\0'; }
  char take() {
    char c = s[i++];
    if (c == '\n') {
      line++;
      col = 1;
    } else {
      col++;
    }
    return c;
  }
  SourceLoc loc() const { return SourceLoc{file, line, col}; }
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }

uint64_t parse_digits(Cursor& cur, int base, const SourceLoc& at) {
  uint64_t v = 0;
  bool any = false;
  while (!cur.done()) {
    char c = cur.peek();
    if (c == '_') {
      cur.take();
      continue;
    }
    int d;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
    else if (c == 'x' || c == 'X' || c == 'z' || c == 'Z' || c == '?')
      throw Error(at, "unsupported construct: four-valued literal digit '" + std::string(1, c) + "'");
    else break;
    if (d >= base) break;
    cur.take();
    v = v * base + d;
    any = true;
  }
  if (!any) throw Error(at, "malformed number literal");
  return v;
}

}  // namespace

std::vector<Token> lex_verilog(const std::string& text, const std::string& filename) {
  Cursor cur{text, filename};
  std::vector<Token> out;

  while (!cur.done()) {
    char c = cur.peek();
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      cur.take();
      continue;
    }
    if (c == '/' && cur.peek(1) == '/') {
      while (!cur.done() && cur.peek() != '\n') cur.take();
      continue;
    }
    if (c == '/' && cur.peek(1) == '*') {
      SourceLoc at = cur.loc();
      cur.take();
      cur.take();
      while (!(cur.peek() == '*' && cur.peek(1) == '/')) {
        if (cur.done()) throw Error(at, "unterminated block comment");
        cur.take();
      }
      cur.take();
      cur.take();
      continue;
    }
    if (c == '`')
      throw Error(cur.loc(), "unsupported construct: preprocessor directive");

    SourceLoc at = cur.loc();

    if (ident_start(c)) {
      std::string id;
      while (!cur.done() && ident_char(cur.peek())) id += cur.take();
      out.push_back(Token{Tok::Ident, id, 0, 0, at});
      continue;
    }

    if (std::isdigit(static_cast<unsigned char>(c))) {
      uint64_t v = parse_digits(cur, 10, at);
      if (cur.peek() == '\'') {
        cur.take();
        if (v == 0 || v > 64)
          throw Error(at, "literal width must be between 1 and 64 bits");
        char b = cur.take();
        int base;
        switch (b) {
          case 'b': case 'B': base = 2; break;
          case 'o': case 'O': base = 8; break;
          case 'd': case 'D': base = 10; break;
          case 'h': case 'H': base = 16; break;
          default: throw Error(at, std::string("unknown literal base '") + b + "'");
        }
        unsigned width = static_cast<unsigned>(v);
        uint64_t value = parse_digits(cur, base, at);
        uint64_t mask = width >= 64 ? ~uint64_t{0} : ((uint64_t{1} << width) - 1);
        if (value > mask)
          throw Error(at, "literal value does not fit in " + std::to_string(width) + " bits");
        out.push_back(Token{Tok::Sized, "", value, width, at});
      } else {
        out.push_back(Token{Tok::Number, "", v, 0, at});
      }
      continue;
    }

    if (c == '\'')
      throw Error(at, "unsupported construct: unsized based literal");

    // multi-character operators first
    static const char* two[] = {"<=", ">=", "==", "!=", "&&", "||", "<<", ">>",
                                "+:", "++", "@(", nullptr};
    std::string spelled;
    for (int k = 0; two[k]; ++k) {
      if (cur.peek() == two[k][0] && cur.peek(1) == two[k][1]) {
        spelled = two[k];
        break;
      }
    }
    if (spelled == "@(") spelled.clear();  // '@' and '(' tokenize separately
    if (!spelled.empty()) {
      cur.take();
      cur.take();
      out.push_back(Token{Tok::Punct, spelled, 0, 0, at});
      continue;
    }

    static const std::string singles = "()[]{};,.:#?=+-*~!&|^<>@";
    if (singles.find(c) != std::string::npos) {
      cur.take();
      out.push_back(Token{Tok::Punct, std::string(1, c), 0, 0, at});
      continue;
    }

    throw Error(at, std::string("unexpected character '") + c + "'");
  }

  out.push_back(Token{Tok::End, "", 0, 0, cur.loc()});
  return out;
}

}  // namespace coverif::rtl
