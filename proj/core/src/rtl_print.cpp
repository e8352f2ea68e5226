// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <sstream>

#include "coverif/rtl_ast.hpp"

namespace coverif::rtl {

const Port* ModuleAst::find_port(const std::string& n) const {
  for (const auto& p : ports)
    if (p.name == n) return &p;
  return nullptr;
}

const Net* ModuleAst::find_net(const std::string& n) const {
  for (const auto& p : nets)
    if (p.name == n) return &p;
  return nullptr;
}

namespace {

const char* un_op_str(UnOp op) {
  switch (op) {
    case UnOp::BitNot: return "~";
    case UnOp::LogNot: return "!";
    case UnOp::Minus: return "-";
    case UnOp::RedAnd: return "&";
    case UnOp::RedOr: return "|";
    case UnOp::RedXor: return "^";
  }
  return "?";
}

const char* bin_op_str(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Shl: return "<<";
    case BinOp::Shr: return ">>";
    case BinOp::And: return "&";
    case BinOp::Or: return "|";
    case BinOp::Xor: return "^";
    case BinOp::LogAnd: return "&&";
    case BinOp::LogOr: return "||";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
  }
  return "?";
}

void expr_text(const ExprAst& e, std::ostream& os, bool canonical) {
  switch (e.kind) {
    case ExprKind::Ident:
      os << e.ident;
      break;
    case ExprKind::Const:
      if (e.sized)
        os << e.const_width << "'d" << e.value;
      else
        os << e.value;
      break;
    case ExprKind::BitSelect:
      os << e.ident << "[";
      expr_text(*e.index, os, canonical);
      os << "]";
      break;
    case ExprKind::PartSelect:
      os << e.ident << "[";
      expr_text(*e.msb, os, canonical);
      os << ":";
      expr_text(*e.lsb, os, canonical);
      os << "]";
      break;
    case ExprKind::IndexedPart:
      os << e.ident << "[";
      expr_text(*e.index, os, canonical);
      os << " +: " << e.part_width << "]";
      break;
    case ExprKind::Concat: {
      os << "{";
      bool first = true;
      for (const auto& op : e.operands) {
        if (!first) os << ", ";
        first = false;
        expr_text(*op, os, canonical);
      }
      os << "}";
      break;
    }
    case ExprKind::Unary:
      os << un_op_str(e.un_op) << "(";
      expr_text(*e.lhs, os, canonical);
      os << ")";
      break;
    case ExprKind::Binary:
      os << "(";
      expr_text(*e.lhs, os, canonical);
      os << " " << bin_op_str(e.bin_op) << " ";
      expr_text(*e.rhs, os, canonical);
      os << ")";
      break;
    case ExprKind::Ternary:
      os << "(";
      expr_text(*e.cond, os, canonical);
      os << " ? ";
      expr_text(*e.lhs, os, canonical);
      os << " : ";
      expr_text(*e.rhs, os, canonical);
      os << ")";
      break;
  }
}

void lvalue_text(const LValue& lv, std::ostream& os) {
  os << lv.name;
  switch (lv.kind) {
    case ExprKind::Ident:
      break;
    case ExprKind::BitSelect:
      os << "[";
      expr_text(*lv.index, os, true);
      os << "]";
      break;
    case ExprKind::PartSelect:
      os << "[";
      expr_text(*lv.msb, os, true);
      os << ":";
      expr_text(*lv.lsb, os, true);
      os << "]";
      break;
    case ExprKind::IndexedPart:
      os << "[";
      expr_text(*lv.index, os, true);
      os << " +: " << lv.part_width << "]";
      break;
    default:
      break;
  }
}

void stmt_text(const StmtAst& s, std::ostream& os, int indent) {
  std::string pad(indent * 2, ' ');
  switch (s.kind) {
    case StmtKind::Block:
      os << pad << "begin\n";
      for (const auto& inner : s.stmts) stmt_text(*inner, os, indent + 1);
      os << pad << "end\n";
      break;
    case StmtKind::If:
      os << pad << "if (";
      expr_text(*s.cond, os, true);
      os << ")\n";
      stmt_text(*s.then_branch, os, indent + 1);
      if (s.else_branch) {
        os << pad << "else\n";
        stmt_text(*s.else_branch, os, indent + 1);
      }
      break;
    case StmtKind::Assign:
      os << pad;
      lvalue_text(s.lhs, os);
      os << (s.blocking ? " = " : " <= ");
      expr_text(*s.rhs, os, true);
      os << ";\n";
      break;
    case StmtKind::For:
      os << pad << "for (" << s.loop_var << " = ";
      expr_text(*s.loop_init, os, true);
      os << "; ";
      expr_text(*s.cond, os, true);
      os << "; " << s.loop_var << " = ";
      expr_text(*s.loop_step, os, true);
      os << ")\n";
      stmt_text(*s.body, os, indent + 1);
      break;
  }
}

void range_text(const Range& r, std::ostream& os) {
  if (r.scalar()) return;
  os << "[";
  expr_text(*r.msb, os, true);
  os << ":";
  expr_text(*r.lsb, os, true);
  os << "] ";
}

}  // namespace

std::string dump(const ExprAst& e) {
  std::ostringstream os;
  expr_text(e, os, true);
  return os.str();
}

std::string dump(const ModuleAst& m) {
  // The pretty-printed form is already canonical (fully parenthesized,
  // normalized literals), so it doubles as the structural dump.
  return print_verilog(m);
}

std::string print_verilog(const ModuleAst& m) {
  std::ostringstream os;
  os << "module " << m.name << "(";
  for (size_t i = 0; i < m.ports.size(); ++i) {
    if (i) os << ", ";
    os << m.ports[i].name;
  }
  os << ");\n";
  for (const auto& [name, value] : m.parameters) {
    os << "  parameter " << name << " = ";
    expr_text(*value, os, true);
    os << ";\n";
  }
  for (const auto& p : m.ports) {
    os << "  " << (p.dir == Dir::Input ? "input" : p.dir == Dir::Output ? "output" : "inout")
       << " ";
    range_text(p.range, os);
    os << p.name << ";\n";
  }
  for (const auto& n : m.nets) {
    os << "  " << (n.kind == NetKind::Wire ? "wire" : "reg") << " ";
    range_text(n.range, os);
    os << n.name << ";\n";
  }
  for (const auto& a : m.continuous_assigns) {
    os << "  assign ";
    lvalue_text(a.lhs, os);
    os << " = ";
    expr_text(*a.rhs, os, true);
    os << ";\n";
  }
  for (const auto& ia : m.initial_assigns) {
    os << "  initial " << ia.name << " = ";
    expr_text(*ia.value, os, true);
    os << ";\n";
  }
  for (const auto& blk : m.always_blocks) {
    os << "  always @(";
    if (blk.trigger == Trigger::Posedge)
      os << "posedge " << blk.clock;
    else
      os << "*";
    os << ")\n";
    stmt_text(*blk.body, os, 2);
  }
  for (const auto& inst : m.instances) {
    os << "  " << inst.module_name << " " << inst.instance_name << "(";
    bool first = true;
    for (const auto& [formal, actual] : inst.bindings) {
      if (!first) os << ", ";
      first = false;
      if (!formal.empty()) os << "." << formal << "(";
      expr_text(*actual, os, true);
      if (!formal.empty()) os << ")";
    }
    os << ");\n";
  }
  os << "endmodule\n";
  return os.str();
}

std::string print_verilog(const std::vector<ModuleAst>& modules) {
  std::string out;
  for (const auto& m : modules) {
    out += print_verilog(m);
    out += "\n";
  }
  return out;
}

}  // namespace coverif::rtl
