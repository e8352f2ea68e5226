// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "coverif/bv_json.hpp"
#include "coverif/synth.hpp"

namespace coverif::synth {

namespace {

const char* ctype(unsigned w) {
  if (w == 1) return "_Bool";
  if (w <= 8) return "_u8";
  if (w <= 16) return "_u16";
  if (w <= 32) return "_u32";
  return "_u64";
}

const char* nondet_fn(unsigned w) {
  if (w == 1) return "nondet_bool()";
  if (w <= 8) return "nondet_u8()";
  if (w <= 16) return "nondet_u16()";
  if (w <= 32) return "nondet_u32()";
  return "nondet_u64()";
}

unsigned ctype_bits(unsigned w) {
  if (w == 1) return 1;
  if (w <= 8) return 8;
  if (w <= 16) return 16;
  if (w <= 32) return 32;
  return 64;
}

std::string hex(uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  if (v > 0xFFFFFFFFull) os << "ULL";
  return os.str();
}

std::string mask_of(unsigned w) { return hex(bv::width_mask(w)); }

// C name resolution: struct members render with their dotted hierarchical
// path (the global is named after the top module); everything else is a
// function local with '_'-joined path segments.
struct Namer {
  std::string top;
  std::set<std::string> members;  // hierarchical names rendered as members

  std::string local_name(const std::string& hier) const {
    std::string tail = hier.substr(top.size() + 1);
    std::string out;
    for (char c : tail) out += c == '.' ? '_' : c;
    // shadow copies read more naturally as x_old than x__old
    auto pos = out.find("__old");
    if (pos != std::string::npos) out = out.substr(0, pos) + "_old";
    return out;
  }

  std::string operator()(const std::string& hier) const {
    if (members.contains(hier)) return hier;
    return local_name(hier);
  }
};

class CWriter {
 public:
  CWriter(const SwNetlistProgram& p) : p_(p) {
    namer_.top = p.top;
    pick_members();
  }

  std::string run() {
    prelude();
    structs();
    initial_block();
    comb_functions();
    cycle_function();
    main_function();
    return os_.str();
  }

 private:
  const SwNetlistProgram& p_;
  Namer namer_;
  std::ostringstream os_;
  bool uses_redxor_ = false;
  std::vector<std::vector<const ir::Stmt*>> comb_groups_;  // havoc runs + assume

  void pick_members() {
    for (const auto& [n, w] : p_.state_vars) namer_.members.insert(n);
    for (const auto& [n, w] : p_.outputs) namer_.members.insert(n);
    for (const auto& c : p_.clusters) {
      for (const auto& m : c.members) namer_.members.insert(m);
      for (const auto& [lhs, rhs] : c.equations) {
        std::vector<const bv::Expr*> vars;
        bv::collect_vars(rhs, vars);
        for (const auto* v : vars) namer_.members.insert(v->name);
      }
    }
  }

  bool is_input(const std::string& n) const {
    return std::any_of(p_.inputs.begin(), p_.inputs.end(),
                       [&](const auto& i) { return i.first == n; });
  }

  unsigned width_of(const std::string& n) const { return p_.var_widths.at(n); }

  // ---- expression rendering ----

  std::string expr(const bv::ExprRef& e) {
    using bv::Op;
    auto wrap = [](const std::string& s) { return "(" + s + ")"; };
    switch (e->op) {
      case Op::Var: return namer_(e->name);
      case Op::Const: return hex(e->value);
      case Op::Not: return wrap("~" + expr(e->a) + " & " + mask_of(e->width));
      case Op::And: return wrap(expr(e->a) + " & " + expr(e->b));
      case Op::Or: return wrap(expr(e->a) + " | " + expr(e->b));
      case Op::Xor: return wrap(expr(e->a) + " ^ " + expr(e->b));
      case Op::Neg: return wrap("(0 - " + expr(e->a) + ") & " + mask_of(e->width));
      case Op::Add: return wrap("(" + expr(e->a) + " + " + expr(e->b) + ") & " + mask_of(e->width));
      case Op::Sub: return wrap("(" + expr(e->a) + " - " + expr(e->b) + ") & " + mask_of(e->width));
      case Op::Mul: return wrap("(" + expr(e->a) + " * " + expr(e->b) + ") & " + mask_of(e->width));
      case Op::Shl:
        return wrap("(" + expr(e->b) + " >= " + std::to_string(e->width) + ") ? 0 : ((" +
                    expr(e->a) + " << " + expr(e->b) + ") & " + mask_of(e->width) + ")");
      case Op::Lshr:
        return wrap("(" + expr(e->b) + " >= " + std::to_string(e->a->width) + ") ? 0 : (" +
                    expr(e->a) + " >> " + expr(e->b) + ")");
      case Op::Eq: return wrap(expr(e->a) + " == " + expr(e->b));
      case Op::Ult: return wrap(expr(e->a) + " < " + expr(e->b));
      case Op::Ule: return wrap(expr(e->a) + " <= " + expr(e->b));
      case Op::Slt: {
        std::string sign = hex(uint64_t{1} << (e->a->width - 1));
        return wrap("(" + expr(e->a) + " ^ " + sign + ") < (" + expr(e->b) + " ^ " + sign + ")");
      }
      case Op::Ite:
        return wrap(expr(e->a) + " ? " + expr(e->b) + " : " + expr(e->c));
      case Op::Extract:
        return wrap("(" + expr(e->a) + " >> " + std::to_string(e->lo) + ") & " +
                    mask_of(e->width));
      case Op::Concat:
        return wrap("(" + expr(e->a) + " << " + std::to_string(e->b->width) + ") | " +
                    expr(e->b));
      case Op::Zext: return expr(e->a);
      case Op::Sext: {
        std::string sign = hex(uint64_t{1} << (e->a->width - 1));
        return wrap("((" + expr(e->a) + " ^ " + sign + ") - " + sign + ") & " +
                    mask_of(e->width));
      }
      case Op::RedOr: return wrap(expr(e->a) + " != 0");
      case Op::RedAnd: return wrap(expr(e->a) + " == " + mask_of(e->a->width));
      case Op::RedXor:
        uses_redxor_ = true;
        return "redxor(" + expr(e->a) + ")";
    }
    return "0";
  }

  // ---- sections ----

  void prelude() {
    os_ << "/* " << p_.top << ".c -- software netlist model generated by coverif */\n\n";
    os_ << "typedef unsigned char _u8;\n"
        << "typedef unsigned short _u16;\n"
        << "typedef unsigned int _u32;\n"
        << "typedef unsigned long long _u64;\n\n";
    os_ << "extern _Bool nondet_bool(void);\n"
        << "extern _u8 nondet_u8(void);\n"
        << "extern _u16 nondet_u16(void);\n"
        << "extern _u32 nondet_u32(void);\n"
        << "extern _u64 nondet_u64(void);\n"
        << "extern void assume(_Bool cond);\n\n";
  }

  // Per-module member lists; a module struct exists when it has members or
  // a sub-instance with a struct.
  void structs() {
    // group member signals by instance path prefix
    struct Node {
      std::vector<std::string> leaves;
      std::vector<std::string> children;  // child paths
    };
    std::map<std::string, Node> nodes;
    nodes[p_.top];
    // Collect members under their owning instance path, preserving the
    // signal-table order for struct layout.
    std::vector<std::string> ordered(namer_.members.begin(), namer_.members.end());
    std::sort(ordered.begin(), ordered.end(), [&](const std::string& a, const std::string& b) {
      return var_rank(a) < var_rank(b);
    });
    for (const auto& m : ordered) {
      auto dot = m.rfind('.');
      std::string path = m.substr(0, dot);
      std::string cur = path;
      while (cur != p_.top && !cur.empty()) {
        nodes[cur];
        auto d2 = cur.rfind('.');
        std::string parent = d2 == std::string::npos ? p_.top : cur.substr(0, d2);
        auto& pn = nodes[parent];
        if (std::find(pn.children.begin(), pn.children.end(), cur) == pn.children.end())
          pn.children.push_back(cur);
        cur = parent;
      }
      nodes[path].leaves.push_back(m.substr(dot + 1));
    }

    // emit depth-first, children before parents
    std::function<void(const std::string&)> emit = [&](const std::string& path) {
      Node& n = nodes.at(path);
      for (const auto& c : n.children) emit(c);
      std::string tag = path == p_.top ? "state_elements_" + p_.top
                                       : "module_" + namer_.local_name(path);
      os_ << "struct " << tag << " {\n";
      for (const auto& leaf : n.leaves)
        os_ << "  " << ctype(width_of(path + "." + leaf)) << " " << leaf << ";\n";
      for (const auto& c : n.children) {
        auto dot = c.rfind('.');
        os_ << "  struct module_" << namer_.local_name(c) << " " << c.substr(dot + 1)
            << ";\n";
      }
      os_ << "};\n";
    };
    emit(p_.top);
    os_ << "struct state_elements_" << p_.top << " " << p_.top << ";\n\n";
  }

  size_t var_rank(const std::string& name) const {
    size_t i = 0;
    for (const auto& [n, w] : p_.var_widths) {
      if (n == name) return i;
      ++i;
    }
    return i;
  }

  void initial_block() {
    os_ << "void initial_block(void) {\n";
    for (const auto& s : p_.init)
      if (namer_.members.contains(s->lhs))
        os_ << "  " << namer_(s->lhs) << " = " << expr(s->expr) << ";\n";
    os_ << "}\n\n";
  }

  // Split the step statement list at feedback groups (havoc runs followed
  // by one assume).
  void comb_functions() {
    std::vector<const ir::Stmt*> run;
    for (const auto& s : p_.step) {
      if (s->kind == ir::StmtKind::Havoc) {
        run.push_back(s.get());
      } else if (s->kind == ir::StmtKind::Assume && !run.empty()) {
        run.push_back(s.get());
        comb_groups_.push_back(run);
        run.clear();
      } else {
        run.clear();
      }
    }
    for (size_t i = 0; i < comb_groups_.size(); ++i) {
      os_ << "void " << p_.top << "_comb" << (i ? std::to_string(i + 1) : "")
          << "(void) {\n";
      for (const auto* s : comb_groups_[i]) {
        if (s->kind == ir::StmtKind::Havoc)
          os_ << "  " << namer_(s->lhs) << " = " << nondet_fn(s->width) << ";\n";
        else
          os_ << "  assume(" << expr(s->expr) << ");\n";
      }
      os_ << "}\n\n";
    }
  }

  void collect_locals(const std::vector<ir::StmtPtr>& stmts,
                      std::vector<std::string>& out,
                      std::set<std::string>& seen) {
    auto add = [&](const std::string& name) {
      if (!namer_.members.contains(name) && !is_input(name) &&
          name != p_.clock && seen.insert(name).second)
        out.push_back(name);
    };
    auto add_reads = [&](const bv::ExprRef& e) {
      if (!e) return;
      std::vector<const bv::Expr*> vars;
      bv::collect_vars(e, vars);
      for (const auto* v : vars) add(v->name);
    };
    for (const auto& s : stmts) {
      if (s->kind == ir::StmtKind::Assign || s->kind == ir::StmtKind::Havoc)
        add(s->lhs);
      add_reads(s->expr);
      if (s->kind == ir::StmtKind::If) {
        collect_locals(s->then_stmts, out, seen);
        collect_locals(s->else_stmts, out, seen);
      }
    }
  }

  void stmt(const ir::StmtPtr& s, int indent, size_t& comb_at) {
    std::string pad(indent * 2, ' ');
    switch (s->kind) {
      case ir::StmtKind::Assign:
        os_ << pad << namer_(s->lhs) << " = " << expr(s->expr) << ";\n";
        break;
      case ir::StmtKind::Havoc:
        // part of a feedback group, rendered as the function call when the
        // closing assume is reached
        break;
      case ir::StmtKind::Assume:
        os_ << pad << p_.top << "_comb" << (comb_at ? std::to_string(comb_at + 1) : "")
            << "();\n";
        ++comb_at;
        break;
      case ir::StmtKind::If:
        os_ << pad << "if (" << expr(s->expr) << ") {\n";
        for (const auto& t : s->then_stmts) stmt(t, indent + 1, comb_at);
        if (!s->else_stmts.empty()) {
          os_ << pad << "} else {\n";
          for (const auto& e : s->else_stmts) stmt(e, indent + 1, comb_at);
        }
        os_ << pad << "}\n";
        break;
      default:
        break;
    }
  }

  void cycle_function() {
    os_ << "void " << p_.top << "_cycle(";
    bool first = true;
    if (!p_.clock.empty()) {
      os_ << "_Bool " << p_.clock.substr(p_.top.size() + 1);
      first = false;
    }
    for (const auto& [n, w] : p_.inputs) {
      if (!first) os_ << ", ";
      first = false;
      os_ << ctype(w) << " " << n.substr(p_.top.size() + 1);
    }
    if (first) os_ << "void";
    os_ << ") {\n";

    std::vector<std::string> locals;
    std::set<std::string> seen;
    collect_locals(p_.step, locals, seen);
    for (const auto& l : locals)
      os_ << "  " << ctype(width_of(l)) << " " << namer_(l) << " = 0;\n";
    // inputs that feedback equalities reference live in the struct too
    for (const auto& [n, w] : p_.inputs)
      if (namer_.members.contains(n))
        os_ << "  " << n << " = " << n.substr(p_.top.size() + 1) << ";\n";
    if (!locals.empty() || !p_.inputs.empty()) os_ << "\n";

    size_t comb_at = 0;
    for (const auto& s : p_.step) {
      // input reads render as the parameter names
      stmt(s, 1, comb_at);
    }
    os_ << "}\n\n";
  }

  void main_function() {
    os_ << "int main(void) {\n";
    os_ << "  initial_block();\n";
    bool sequential = !p_.clock.empty();
    std::string pad = "  ";
    if (sequential) {
      os_ << "  while (1) {\n";
      pad = "    ";
    }
    os_ << pad << "/* nondeterministic input assignment */\n";
    os_ << pad << p_.top << "_cycle(";
    bool first = true;
    if (sequential) {
      os_ << "1";
      first = false;
    }
    for (const auto& [n, w] : p_.inputs) {
      if (!first) os_ << ", ";
      first = false;
      os_ << nondet_fn(w);
    }
    os_ << ");\n";
    if (sequential) os_ << "  }\n";
    os_ << "  return 0;\n}\n";
  }
};

}  // namespace

std::string emit_c(const SwNetlistProgram& program) {
  CWriter w(program);
  std::string out = w.run();
  // the redxor helper is rare; prepend it only when referenced
  if (out.find("redxor(") != std::string::npos) {
    auto pos = out.find("extern void assume");
    pos = out.find('\n', pos);
    std::string helper =
        "\n\nstatic _u64 redxor(_u64 v) {\n"
        "  v ^= v >> 32; v ^= v >> 16; v ^= v >> 8;\n"
        "  v ^= v >> 4; v ^= v >> 2; v ^= v >> 1;\n"
        "  return v & 1;\n"
        "}";
    out.insert(pos + 1, helper);
  }
  return out;
}

nlohmann::json program_to_json(const SwNetlistProgram& program) {
  using nlohmann::json;
  json j;
  j["top"] = program.top;
  j["clock"] = program.clock;
  auto pairs = [](const std::vector<std::pair<std::string, unsigned>>& v) {
    json a = json::array();
    for (const auto& [n, w] : v) a.push_back(json{{"name", n}, {"width", w}});
    return a;
  };
  j["state_vars"] = pairs(program.state_vars);
  j["inputs"] = pairs(program.inputs);
  j["outputs"] = pairs(program.outputs);
  json init = json::array();
  for (const auto& s : program.init) init.push_back(ir::stmt_to_json(*s));
  j["init"] = init;
  json step = json::array();
  for (const auto& s : program.step) step.push_back(ir::stmt_to_json(*s));
  j["step"] = step;
  if (program.comb_constraint)
    j["comb_constraint"] = bv::to_json(program.comb_constraint);
  json clusters = json::array();
  for (const auto& c : program.clusters) {
    json cj;
    cj["members"] = c.members;
    cj["solvable"] = c.solvable;
    json eqs = json::array();
    for (const auto& [lhs, rhs] : c.equations)
      eqs.push_back(json{{"lhs", lhs}, {"rhs", bv::to_json(rhs)}});
    cj["equations"] = eqs;
    clusters.push_back(cj);
  }
  j["clusters"] = clusters;
  json widths = json::object();
  for (const auto& [n, w] : program.var_widths) widths[n] = w;
  j["var_widths"] = widths;
  return j;
}

}  // namespace coverif::synth
