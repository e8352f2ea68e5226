// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "coverif/rtl_parse.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "rtl_lex.hpp"

namespace coverif::rtl {

namespace {

const std::set<std::string> kKeywords = {
    "module", "endmodule", "input", "output", "inout", "wire", "reg",
    "assign", "always", "begin", "end", "if", "else", "for", "posedge",
    "parameter", "initial", "integer",
};

// Constructs outside the subset that deserve a by-name diagnostic instead
// of a generic syntax error.
const std::set<std::string> kRejected = {
    "case", "casex", "casez", "endcase", "fork", "join", "task", "function",
    "generate", "genvar", "real", "negedge", "defparam", "specify", "tri",
    "supply0", "supply1", "while", "repeat", "forever", "wait", "event",
    "localparam", "signed", "time", "endtask", "endfunction", "disable",
};

class Parser {
 public:
  Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  std::vector<ModuleAst> parse() {
    std::vector<ModuleAst> modules;
    std::set<std::string> names;
    while (!at_end()) {
      ModuleAst m = parse_module();
      if (!names.insert(m.name).second)
        throw Error(m.loc, "duplicate module name '" + m.name + "'");
      modules.push_back(std::move(m));
    }
    return modules;
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;

  const Token& cur() const { return toks_[pos_]; }
  const Token& next() const { return toks_[pos_ + 1 < toks_.size() ? pos_ + 1 : pos_]; }
  bool at_end() const { return cur().kind == Tok::End; }

  bool is_punct(const std::string& p) const {
    return cur().kind == Tok::Punct && cur().text == p;
  }
  bool is_kw(const std::string& k) const {
    return cur().kind == Tok::Ident && cur().text == k;
  }
  Token take() { return toks_[pos_++]; }
  void expect_punct(const std::string& p) {
    if (!is_punct(p)) throw Error(cur().loc, "expected '" + p + "'");
    take();
  }
  void expect_kw(const std::string& k) {
    if (!is_kw(k)) throw Error(cur().loc, "expected '" + k + "'");
    take();
  }
  std::string expect_ident() {
    if (cur().kind != Tok::Ident) throw Error(cur().loc, "expected identifier");
    const std::string& t = cur().text;
    if (kRejected.contains(t))
      throw Error(cur().loc, "unsupported construct: '" + t + "'");
    if (kKeywords.contains(t))
      throw Error(cur().loc, "unexpected keyword '" + t + "'");
    return take().text;
  }
  void reject_if_unsupported() {
    if (cur().kind == Tok::Ident && kRejected.contains(cur().text))
      throw Error(cur().loc, "unsupported construct: '" + cur().text + "'");
    if (is_punct("#"))
      throw Error(cur().loc, "unsupported construct: delay control / parameter override");
  }

  ModuleAst parse_module() {
    reject_if_unsupported();
    if (!is_kw("module"))
      throw Error(cur().loc, "expected 'module'");
    ModuleAst m;
    m.loc = cur().loc;
    take();
    m.name = expect_ident();
    std::vector<std::string> header_ports;
    if (is_punct("(")) {
      take();
      if (!is_punct(")")) {
        for (;;) {
          if (is_kw("input") || is_kw("output") || is_kw("inout"))
            throw Error(cur().loc,
                        "unsupported construct: ANSI port declaration (declare "
                        "direction in the module body)");
          header_ports.push_back(expect_ident());
          if (is_punct(",")) { take(); continue; }
          break;
        }
      }
      expect_punct(")");
    }
    expect_punct(";");

    // Port order comes from the header list; directions/widths attach as
    // the body declarations are parsed.
    for (const auto& p : header_ports)
      m.ports.push_back(Port{p, Dir::Input, {}, m.loc, 0});

    while (!is_kw("endmodule")) {
      if (at_end()) throw Error(cur().loc, "missing 'endmodule'");
      parse_item(m, header_ports);
    }
    take();  // endmodule
    return m;
  }

  Range parse_opt_range() {
    Range r;
    if (is_punct("[")) {
      take();
      r.msb = parse_expr();
      expect_punct(":");
      r.lsb = parse_expr();
      expect_punct("]");
    }
    return r;
  }

  void parse_item(ModuleAst& m, const std::vector<std::string>& header_ports) {
    reject_if_unsupported();

    if (is_kw("input") || is_kw("output") || is_kw("inout")) {
      Dir dir = is_kw("input") ? Dir::Input : is_kw("output") ? Dir::Output : Dir::Inout;
      SourceLoc at = cur().loc;
      take();
      Range r = parse_opt_range();
      for (;;) {
        std::string name = expect_ident();
        auto it = std::find(header_ports.begin(), header_ports.end(), name);
        if (it == header_ports.end())
          throw Error(at, "port '" + name + "' is not listed in the module header");
        for (auto& p : m.ports)
          if (p.name == name) {
            p.dir = dir;
            p.range = r;
            p.loc = at;
          }
        if (is_punct(",")) { take(); continue; }
        break;
      }
      expect_punct(";");
      return;
    }

    if (is_kw("wire") || is_kw("reg")) {
      NetKind kind = is_kw("wire") ? NetKind::Wire : NetKind::Reg;
      SourceLoc at = cur().loc;
      take();
      Range r = parse_opt_range();
      for (;;) {
        std::string name = expect_ident();
        m.nets.push_back(Net{name, kind, r, at, 0});
        if (is_punct(",")) { take(); continue; }
        break;
      }
      expect_punct(";");
      return;
    }

    if (is_kw("integer")) {
      // Loop index declarations; they exist only at elaboration time.
      SourceLoc at = cur().loc;
      take();
      for (;;) {
        std::string name = expect_ident();
        m.nets.push_back(Net{name, NetKind::Reg, Range{}, at, 0});
        if (is_punct(",")) { take(); continue; }
        break;
      }
      expect_punct(";");
      return;
    }

    if (is_kw("parameter")) {
      take();
      for (;;) {
        std::string name = expect_ident();
        expect_punct("=");
        m.parameters.emplace_back(name, parse_expr());
        if (is_punct(",")) { take(); continue; }
        break;
      }
      expect_punct(";");
      return;
    }

    if (is_kw("assign")) {
      SourceLoc at = cur().loc;
      take();
      LValue lv = parse_lvalue();
      expect_punct("=");
      ExprPtr rhs = parse_expr();
      expect_punct(";");
      m.continuous_assigns.push_back(ContinuousAssign{std::move(lv), std::move(rhs), at});
      return;
    }

    if (is_kw("always")) {
      AlwaysBlock blk;
      blk.loc = cur().loc;
      take();
      expect_punct("@");
      expect_punct("(");
      if (is_kw("posedge")) {
        take();
        blk.trigger = Trigger::Posedge;
        blk.clock = expect_ident();
      } else if (is_punct("*")) {
        take();
        blk.trigger = Trigger::Comb;
      } else {
        throw Error(cur().loc,
                    "unsupported construct: sensitivity list (use @(posedge clk) or @(*))");
      }
      expect_punct(")");
      blk.body = parse_stmt();
      m.always_blocks.push_back(std::move(blk));
      return;
    }

    if (is_kw("initial")) {
      SourceLoc at = cur().loc;
      take();
      reject_if_unsupported();
      auto parse_one = [&]() {
        std::string name = expect_ident();
        expect_punct("=");
        ExprPtr value = parse_expr();
        expect_punct(";");
        m.initial_assigns.push_back(InitialAssign{name, std::move(value), at});
      };
      if (is_kw("begin")) {
        take();
        while (!is_kw("end")) {
          reject_if_unsupported();
          parse_one();
        }
        take();
      } else {
        parse_one();
      }
      return;
    }

    if (cur().kind == Tok::Ident) {
      // module instantiation: <module> <instance> ( bindings ) ;
      Instance inst;
      inst.loc = cur().loc;
      inst.module_name = expect_ident();
      inst.instance_name = expect_ident();
      expect_punct("(");
      if (!is_punct(")")) {
        bool named = is_punct(".");
        for (;;) {
          if (named) {
            expect_punct(".");
            std::string formal = expect_ident();
            expect_punct("(");
            inst.bindings.emplace_back(formal, parse_expr());
            expect_punct(")");
          } else {
            inst.bindings.emplace_back("", parse_expr());
          }
          if (is_punct(",")) { take(); continue; }
          break;
        }
      }
      expect_punct(")");
      expect_punct(";");
      m.instances.push_back(std::move(inst));
      return;
    }

    throw Error(cur().loc, "expected module item");
  }

  StmtPtr parse_stmt() {
    reject_if_unsupported();
    auto s = std::make_shared<StmtAst>();
    s->loc = cur().loc;

    if (is_kw("begin")) {
      take();
      s->kind = StmtKind::Block;
      while (!is_kw("end")) {
        if (at_end()) throw Error(s->loc, "missing 'end'");
        s->stmts.push_back(parse_stmt());
      }
      take();
      return s;
    }

    if (is_kw("if")) {
      take();
      s->kind = StmtKind::If;
      expect_punct("(");
      s->cond = parse_expr();
      expect_punct(")");
      s->then_branch = parse_stmt();
      if (is_kw("else")) {
        take();
        s->else_branch = parse_stmt();
      }
      return s;
    }

    if (is_kw("for")) {
      take();
      s->kind = StmtKind::For;
      expect_punct("(");
      s->loop_var = expect_ident();
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
        auto one = std::make_shared<ExprAst>();
        one->kind = ExprKind::Const;
        one->value = 1;
        one->loc = s->loc;
        auto iv = std::make_shared<ExprAst>();
        iv->kind = ExprKind::Ident;
        iv->ident = s->loop_var;
        iv->loc = s->loc;
        auto sum = std::make_shared<ExprAst>();
        sum->kind = ExprKind::Binary;
        sum->bin_op = BinOp::Add;
        sum->lhs = iv;
        sum->rhs = one;
        sum->loc = s->loc;
        s->loop_step = sum;
      } else {
        expect_punct("=");
        s->loop_step = parse_expr();
      }
      expect_punct(")");
      s->body = parse_stmt();
      return s;
    }

    // assignment
    s->kind = StmtKind::Assign;
    s->lhs = parse_lvalue();
    if (is_punct("=")) {
      take();
      s->blocking = true;
    } else if (is_punct("<=")) {
      take();
      s->blocking = false;
    } else {
      throw Error(cur().loc, "expected '=' or '<='");
    }
    s->rhs = parse_expr();
    expect_punct(";");
    return s;
  }

  LValue parse_lvalue() {
    LValue lv;
    lv.loc = cur().loc;
    lv.name = expect_ident();
    if (is_punct("[")) {
      take();
      ExprPtr first = parse_expr();
      if (is_punct(":")) {
        take();
        lv.kind = ExprKind::PartSelect;
        lv.msb = first;
        lv.lsb = parse_expr();
      } else if (is_punct("+:")) {
        take();
        if (cur().kind != Tok::Number)
          throw Error(cur().loc, "indexed part-select width must be a plain number");
        lv.kind = ExprKind::IndexedPart;
        lv.index = first;
        lv.part_width = static_cast<unsigned>(take().value);
      } else {
        lv.kind = ExprKind::BitSelect;
        lv.index = first;
      }
      expect_punct("]");
    }
    return lv;
  }

  // ---- expressions ----

  ExprPtr parse_expr() { return parse_ternary(); }

  ExprPtr parse_ternary() {
    ExprPtr c = parse_binary(0);
    if (is_punct("?")) {
      auto e = std::make_shared<ExprAst>();
      e->loc = cur().loc;
      take();
      e->kind = ExprKind::Ternary;
      e->cond = c;
      e->lhs = parse_expr();
      expect_punct(":");
      e->rhs = parse_ternary();
      return e;
    }
    return c;
  }

  struct Level {
    const char* spelling;
    BinOp op;
    int prec;
  };

  static const std::vector<Level>& levels() {
    static const std::vector<Level> t = {
        {"||", BinOp::LogOr, 0},
        {"&&", BinOp::LogAnd, 1},
        {"|", BinOp::Or, 2},
        {"^", BinOp::Xor, 3},
        {"&", BinOp::And, 4},
        {"==", BinOp::Eq, 5},  {"!=", BinOp::Ne, 5},
        {"<", BinOp::Lt, 6},   {"<=", BinOp::Le, 6},
        {">", BinOp::Gt, 6},   {">=", BinOp::Ge, 6},
        {"<<", BinOp::Shl, 7}, {">>", BinOp::Shr, 7},
        {"+", BinOp::Add, 8},  {"-", BinOp::Sub, 8},
        {"*", BinOp::Mul, 9},
    };
    return t;
  }

  ExprPtr parse_binary(int min_prec) {
    ExprPtr lhs = min_prec > 9 ? parse_unary() : parse_binary(min_prec + 1);
    for (;;) {
      const Level* match = nullptr;
      if (cur().kind == Tok::Punct) {
        for (const auto& l : levels())
          if (l.prec == min_prec && cur().text == l.spelling) {
            match = &l;
            break;
          }
      }
      if (!match) return lhs;
      auto e = std::make_shared<ExprAst>();
      e->loc = cur().loc;
      take();
      e->kind = ExprKind::Binary;
      e->bin_op = match->op;
      e->lhs = lhs;
      e->rhs = parse_binary(min_prec + 1);
      lhs = e;
    }
  }

  ExprPtr parse_unary() {
    if (cur().kind == Tok::Punct) {
      const std::string& p = cur().text;
      UnOp op;
      bool matched = true;
      if (p == "~") op = UnOp::BitNot;
      else if (p == "!") op = UnOp::LogNot;
      else if (p == "-") op = UnOp::Minus;
      else if (p == "&") op = UnOp::RedAnd;
      else if (p == "|") op = UnOp::RedOr;
      else if (p == "^") op = UnOp::RedXor;
      else matched = false;
      if (matched) {
        auto e = std::make_shared<ExprAst>();
        e->loc = cur().loc;
        take();
        e->kind = ExprKind::Unary;
        e->un_op = op;
        e->lhs = parse_unary();
        return e;
      }
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    reject_if_unsupported();
    auto e = std::make_shared<ExprAst>();
    e->loc = cur().loc;

    if (is_punct("(")) {
      take();
      ExprPtr inner = parse_expr();
      expect_punct(")");
      return inner;
    }

    if (is_punct("{")) {
      take();
      e->kind = ExprKind::Concat;
      for (;;) {
        ExprPtr op = parse_expr();
        if (is_punct("{"))
          throw Error(cur().loc, "unsupported construct: replication");
        e->operands.push_back(op);
        if (is_punct(",")) { take(); continue; }
        break;
      }
      expect_punct("}");
      return e;
    }

    if (cur().kind == Tok::Number) {
      e->kind = ExprKind::Const;
      e->value = take().value;
      e->sized = false;
      return e;
    }
    if (cur().kind == Tok::Sized) {
      Token t = take();
      e->kind = ExprKind::Const;
      e->value = t.value;
      e->const_width = t.width;
      e->sized = true;
      return e;
    }

    std::string name = expect_ident();
    if (is_punct("[")) {
      take();
      auto base = std::make_shared<ExprAst>();
      base->kind = ExprKind::Ident;
      base->ident = name;
      base->loc = e->loc;
      ExprPtr first = parse_expr();
      if (is_punct(":")) {
        take();
        e->kind = ExprKind::PartSelect;
        e->base = base;
        e->ident = name;
        e->msb = first;
        e->lsb = parse_expr();
      } else if (is_punct("+:")) {
        take();
        if (cur().kind != Tok::Number)
          throw Error(cur().loc, "indexed part-select width must be a plain number");
        e->kind = ExprKind::IndexedPart;
        e->base = base;
        e->ident = name;
        e->index = first;
        e->part_width = static_cast<unsigned>(take().value);
      } else {
        e->kind = ExprKind::BitSelect;
        e->base = base;
        e->ident = name;
        e->index = first;
      }
      expect_punct("]");
      return e;
    }
    e->kind = ExprKind::Ident;
    e->ident = name;
    return e;
  }
};

}  // namespace

std::vector<ModuleAst> parse_source(const std::string& text, const std::string& filename) {
  return Parser(lex_verilog(text, filename)).parse();
}

std::vector<ModuleAst> parse_files(const std::vector<std::string>& paths) {
  std::vector<ModuleAst> all;
  std::set<std::string> names;
  for (const auto& p : paths) {
    std::ifstream in(p);
    if (!in) throw Error("cannot open file: " + p);
    std::stringstream ss;
    ss << in.rdbuf();
    for (auto& m : parse_source(ss.str(), p)) {
      if (!names.insert(m.name).second)
        throw Error(m.loc, "duplicate module name '" + m.name + "'");
      all.push_back(std::move(m));
    }
  }
  return all;
}

}  // namespace coverif::rtl
