// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "coverif/fw.hpp"

namespace coverif::fw {

namespace {

enum class Tok { Ident, Number, String, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  uint64_t value = 0;
  SourceLoc loc;
};

std::vector<Token> lex(const std::string& text, const std::string& file) {
  std::vector<Token> out;
  size_t i = 0;
  int line = 1, col = 1;
  auto loc = [&]() { return SourceLoc{file, line, col}; };
  auto advance = [&](char c) {
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  };
  auto take = [&]() {
    char c = text[i++];
    advance(c);
    return c;
  };

  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      take();
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') take();
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
      SourceLoc at = loc();
      take();
      take();
      while (i + 1 < text.size() && !(text[i] == '*' && text[i + 1] == '/')) take();
      if (i + 1 >= text.size()) throw Error(at, "unterminated comment");
      take();
      take();
      continue;
    }
    SourceLoc at = loc();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string id;
      while (i < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
        id += take();
      out.push_back(Token{Tok::Ident, id, 0, at});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      uint64_t v = 0;
      if (c == '0' && i + 1 < text.size() && (text[i + 1] == 'x' || text[i + 1] == 'X')) {
        take();
        take();
        bool any = false;
        while (i < text.size() && std::isxdigit(static_cast<unsigned char>(text[i]))) {
          char d = take();
          v = v * 16 + (std::isdigit(static_cast<unsigned char>(d))
                            ? d - '0'
                            : std::tolower(d) - 'a' + 10);
          any = true;
        }
        if (!any) throw Error(at, "malformed hex literal");
      } else {
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
          v = v * 10 + (take() - '0');
      }
      out.push_back(Token{Tok::Number, "", v, at});
      continue;
    }
    if (c == '"') {
      take();
      std::string s;
      while (i < text.size() && text[i] != '"') s += take();
      if (i >= text.size()) throw Error(at, "unterminated string");
      take();
      out.push_back(Token{Tok::String, s, 0, at});
      continue;
    }
    static const char* two[] = {"==", "!=", "<=", ">=", "&&", "||", "<<", ">>",
                                "++", "|-", "##", nullptr};
    std::string sp;
    for (int k = 0; two[k]; ++k)
      if (c == two[k][0] && i + 1 < text.size() && text[i + 1] == two[k][1]) {
        sp = two[k];
        break;
      }
    if (sp == "|-") {
      if (i + 2 < text.size() && text[i + 2] == '>') {
        take();
        take();
        take();
        out.push_back(Token{Tok::Punct, "|->", 0, at});
        continue;
      }
      sp.clear();
    }
    if (!sp.empty()) {
      take();
      take();
      out.push_back(Token{Tok::Punct, sp, 0, at});
      continue;
    }
    static const std::string singles = "()[]{};,.?:=+-*~!&|^<>";
    if (singles.find(c) != std::string::npos) {
      take();
      out.push_back(Token{Tok::Punct, std::string(1, c), 0, at});
      continue;
    }
    throw Error(at, std::string("unexpected character '") + c + "'");
  }
  out.push_back(Token{Tok::End, "", 0, loc()});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  FirmwareProgram parse() {
    FirmwareProgram p;
    while (cur().kind != Tok::End) p.stmts.push_back(parse_stmt());
    return p;
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
  std::map<std::string, std::pair<unsigned, unsigned>> vars_;  // width, array

  const Token& cur() const { return toks_[pos_]; }
  Token take() { return toks_[pos_++]; }
  bool is_punct(const std::string& p) const {
    return cur().kind == Tok::Punct && cur().text == p;
  }
  bool is_ident(const std::string& k) const {
    return cur().kind == Tok::Ident && cur().text == k;
  }
  void expect_punct(const std::string& p) {
    if (!is_punct(p)) throw Error(cur().loc, "expected '" + p + "'");
    take();
  }
  std::string expect_ident() {
    if (cur().kind != Tok::Ident) throw Error(cur().loc, "expected identifier");
    return take().text;
  }
  uint64_t expect_number() {
    if (cur().kind != Tok::Number) throw Error(cur().loc, "expected number");
    return take().value;
  }

  static bool width_type(const std::string& id, unsigned& w) {
    if (id.size() < 2 || id[0] != 'u') return false;
    unsigned v = 0;
    for (size_t i = 1; i < id.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(id[i]))) return false;
      v = v * 10 + (id[i] - '0');
    }
    if (v < 1 || v > 64) return false;
    w = v;
    return true;
  }

  // dotted signal name
  std::string parse_signal() {
    std::string s = expect_ident();
    while (is_punct(".")) {
      take();
      s += "." + expect_ident();
    }
    return s;
  }

  std::vector<FwStmtPtr> parse_block() {
    expect_punct("{");
    std::vector<FwStmtPtr> out;
    while (!is_punct("}")) {
      if (cur().kind == Tok::End) throw Error(cur().loc, "missing '}'");
      out.push_back(parse_stmt());
    }
    take();
    return out;
  }

  FwStmtPtr parse_stmt() {
    auto s = std::make_shared<FwStmt>();
    s->loc = cur().loc;

    unsigned w = 0;
    if (cur().kind == Tok::Ident && width_type(cur().text, w)) {
      take();
      s->kind = SKind::Decl;
      s->width = w;
      s->name = expect_ident();
      if (is_punct("[")) {
        take();
        s->array_size = static_cast<unsigned>(expect_number());
        if (s->array_size == 0) throw Error(s->loc, "zero-sized array");
        expect_punct("]");
      }
      if (is_punct("=")) {
        take();
        s->init = parse_expr();
        if (s->array_size) throw Error(s->loc, "array initializers are not supported");
      }
      expect_punct(";");
      if (vars_.contains(s->name)) throw Error(s->loc, "redefinition of '" + s->name + "'");
      vars_[s->name] = {w, s->array_size};
      return s;
    }

    if (is_ident("if")) {
      take();
      s->kind = SKind::If;
      expect_punct("(");
      s->cond = parse_expr();
      expect_punct(")");
      s->then_stmts = parse_block();
      if (is_ident("else")) {
        take();
        if (is_ident("if")) {
          s->else_stmts.push_back(parse_stmt());
        } else {
          s->else_stmts = parse_block();
        }
      }
      return s;
    }

    if (is_ident("while")) {
      take();
      s->kind = SKind::While;
      expect_punct("(");
      s->cond = parse_expr();
      expect_punct(")");
      s->body = parse_block();
      return s;
    }

    if (is_ident("for")) {
      take();
      s->kind = SKind::For;
      expect_punct("(");
      s->loop_var = expect_ident();
      if (!vars_.contains(s->loop_var))
        throw Error(s->loc, "undeclared loop variable '" + s->loop_var + "'");
      expect_punct("=");
      s->loop_init = parse_expr();
      expect_punct(";");
      s->cond = parse_expr();
      expect_punct(";");
      std::string step_var = expect_ident();
      if (step_var != s->loop_var)
        throw Error(s->loc, "for-loop step must update the loop variable");
      if (is_punct("++")) {
        take();
        auto one = std::make_shared<FwExpr>();
        one->kind = EKind::Const;
        one->value = 1;
        one->loc = s->loc;
        auto iv = std::make_shared<FwExpr>();
        iv->kind = EKind::Var;
        iv->name = s->loop_var;
        iv->loc = s->loc;
        auto sum = std::make_shared<FwExpr>();
        sum->kind = EKind::Binary;
        sum->bin_op = rtl::BinOp::Add;
        sum->lhs = iv;
        sum->rhs = one;
        sum->loc = s->loc;
        s->loop_step = sum;
      } else {
        expect_punct("=");
        s->loop_step = parse_expr();
      }
      expect_punct(")");
      s->body = parse_block();
      return s;
    }

    if (is_ident("step")) {
      take();
      expect_punct("(");
      expect_punct(")");
      expect_punct(";");
      s->kind = SKind::Step;
      return s;
    }

    if (is_ident("assume")) {
      take();
      s->kind = SKind::Assume;
      expect_punct("(");
      s->expr = parse_expr();
      expect_punct(")");
      expect_punct(";");
      return s;
    }

    if (is_ident("assert")) {
      take();
      s->kind = SKind::Assert;
      expect_punct("(");
      s->expr = parse_expr();
      if (is_punct(",")) {
        take();
        if (cur().kind != Tok::String) throw Error(cur().loc, "expected assert label string");
        s->label = take().text;
      } else {
        s->label = "assert@" + std::to_string(s->loc.line);
      }
      expect_punct(")");
      expect_punct(";");
      return s;
    }

    if (is_ident("set_input")) {
      take();
      s->kind = SKind::SetInput;
      expect_punct("(");
      s->signal = parse_signal();
      expect_punct(",");
      s->expr = parse_expr();
      expect_punct(")");
      expect_punct(";");
      return s;
    }

    if (is_ident("property")) {
      take();
      s->kind = SKind::Property;
      if (cur().kind != Tok::String) throw Error(cur().loc, "expected property label string");
      s->property.label = take().text;
      expect_punct(":");
      s->property.antecedent = parse_expr();
      if (is_punct("|->")) {
        take();
        s->property.consequent_now = parse_expr();
      } else {
        // bare property: the whole expression is the consequent
        s->property.consequent_now = s->property.antecedent;
        s->property.antecedent = nullptr;
      }
      if (is_punct("##")) {
        take();
        s->property.delay = static_cast<unsigned>(expect_number());
        s->property.consequent_later = parse_expr();
      }
      if (cur().kind == Tok::Punct &&
          (cur().text == "|->" || cur().text == "##"))
        throw Error(cur().loc, "unsupported temporal operator chain");
      expect_punct(";");
      return s;
    }

    // assignment
    s->kind = SKind::Assign;
    s->lhs_name = expect_ident();
    if (!vars_.contains(s->lhs_name))
      throw Error(s->loc, "assignment to undeclared variable '" + s->lhs_name + "'");
    if (is_punct("[")) {
      take();
      s->lhs_index = parse_expr();
      expect_punct("]");
    }
    expect_punct("=");
    s->rhs = parse_expr();
    expect_punct(";");
    return s;
  }

  // ---- expressions (C precedence) ----

  FwExprPtr parse_expr() { return parse_ternary(); }

  FwExprPtr parse_ternary() {
    FwExprPtr c = parse_bin(0);
    if (is_punct("?")) {
      auto e = std::make_shared<FwExpr>();
      e->loc = cur().loc;
      take();
      e->kind = EKind::Ternary;
      e->cond = c;
      e->lhs = parse_expr();
      expect_punct(":");
      e->rhs = parse_ternary();
      return e;
    }
    return c;
  }

  struct Level {
    const char* sp;
    rtl::BinOp op;
    int prec;
  };
  static const std::vector<Level>& levels() {
    static const std::vector<Level> t = {
        {"||", rtl::BinOp::LogOr, 0},
        {"&&", rtl::BinOp::LogAnd, 1},
        {"|", rtl::BinOp::Or, 2},
        {"^", rtl::BinOp::Xor, 3},
        {"&", rtl::BinOp::And, 4},
        {"==", rtl::BinOp::Eq, 5},  {"!=", rtl::BinOp::Ne, 5},
        {"<", rtl::BinOp::Lt, 6},   {"<=", rtl::BinOp::Le, 6},
        {">", rtl::BinOp::Gt, 6},   {">=", rtl::BinOp::Ge, 6},
        {"<<", rtl::BinOp::Shl, 7}, {">>", rtl::BinOp::Shr, 7},
        {"+", rtl::BinOp::Add, 8},  {"-", rtl::BinOp::Sub, 8},
        {"*", rtl::BinOp::Mul, 9},
    };
    return t;
  }

  FwExprPtr parse_bin(int min_prec) {
    FwExprPtr lhs = min_prec > 9 ? parse_unary() : parse_bin(min_prec + 1);
    for (;;) {
      const Level* match = nullptr;
      if (cur().kind == Tok::Punct)
        for (const auto& l : levels())
          if (l.prec == min_prec && cur().text == l.sp) {
            match = &l;
            break;
          }
      if (!match) return lhs;
      auto e = std::make_shared<FwExpr>();
      e->loc = cur().loc;
      take();
      e->kind = EKind::Binary;
      e->bin_op = match->op;
      e->lhs = lhs;
      e->rhs = parse_bin(min_prec + 1);
      lhs = e;
    }
  }

  FwExprPtr parse_unary() {
    if (cur().kind == Tok::Punct) {
      rtl::UnOp op;
      bool matched = true;
      if (cur().text == "~") op = rtl::UnOp::BitNot;
      else if (cur().text == "!") op = rtl::UnOp::LogNot;
      else if (cur().text == "-") op = rtl::UnOp::Minus;
      else matched = false;
      if (matched) {
        auto e = std::make_shared<FwExpr>();
        e->loc = cur().loc;
        take();
        e->kind = EKind::Unary;
        e->un_op = op;
        e->lhs = parse_unary();
        return e;
      }
    }
    return parse_primary();
  }

  FwExprPtr parse_primary() {
    auto e = std::make_shared<FwExpr>();
    e->loc = cur().loc;
    if (is_punct("(")) {
      take();
      FwExprPtr inner = parse_expr();
      expect_punct(")");
      return inner;
    }
    if (cur().kind == Tok::Number) {
      e->kind = EKind::Const;
      e->value = take().value;
      return e;
    }
    if (is_ident("nondet")) {
      take();
      expect_punct("(");
      e->kind = EKind::Nondet;
      e->nondet_width = static_cast<unsigned>(expect_number());
      if (e->nondet_width < 1 || e->nondet_width > 64)
        throw Error(e->loc, "nondet width out of range");
      expect_punct(")");
      return e;
    }
    if (is_ident("read_output")) {
      take();
      expect_punct("(");
      e->kind = EKind::ReadOutput;
      e->name = parse_signal();
      expect_punct(")");
      return e;
    }
    std::string name = expect_ident();
    if (!vars_.contains(name))
      throw Error(e->loc, "undeclared variable '" + name + "'");
    if (is_punct("[")) {
      take();
      e->kind = EKind::Index;
      e->name = name;
      e->index = parse_expr();
      expect_punct("]");
      return e;
    }
    e->kind = EKind::Var;
    e->name = name;
    return e;
  }
};

}  // namespace

FirmwareProgram parse_fw(const std::string& text, const std::string& filename) {
  return Parser(lex(text, filename)).parse();
}

FirmwareProgram parse_fw_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_fw(ss.str(), path);
}

std::vector<FwStmtPtr> lower_property(const PropertySpec& p) {
  std::vector<FwStmtPtr> out;

  auto mk_assert = [&](FwExprPtr cond, const std::string& label) {
    auto s = std::make_shared<FwStmt>();
    s->kind = SKind::Assert;
    s->expr = std::move(cond);
    s->label = label;
    return s;
  };

  FwExprPtr now = p.consequent_now;
  if (p.antecedent) {
    auto na = std::make_shared<FwExpr>();
    na->kind = EKind::Unary;
    na->un_op = rtl::UnOp::LogNot;
    na->lhs = p.antecedent;
    auto disj = std::make_shared<FwExpr>();
    disj->kind = EKind::Binary;
    disj->bin_op = rtl::BinOp::LogOr;
    disj->lhs = na;
    disj->rhs = now;
    now = disj;
  }
  out.push_back(mk_assert(now, p.label));

  if (p.consequent_later) {
    for (unsigned i = 0; i < p.delay; ++i) {
      auto st = std::make_shared<FwStmt>();
      st->kind = SKind::Step;
      out.push_back(st);
    }
    out.push_back(mk_assert(p.consequent_later, p.label + "_delayed"));
  }
  return out;
}

}  // namespace coverif::fw
