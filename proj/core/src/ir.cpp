// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "coverif/ir.hpp"

#include <sstream>

#include "coverif/bv_json.hpp"

namespace coverif::ir {

namespace {
std::shared_ptr<Stmt> base(StmtKind k) {
  auto s = std::make_shared<Stmt>();
  s->kind = k;
  return s;
}
}  // namespace

StmtPtr mk_assign(std::string lhs, unsigned width, bv::ExprRef rhs) {
  auto s = base(StmtKind::Assign);
  s->lhs = std::move(lhs);
  s->width = width;
  s->expr = bv::fit(std::move(rhs), width);
  return s;
}

StmtPtr mk_havoc(std::string lhs, unsigned width) {
  auto s = base(StmtKind::Havoc);
  s->lhs = std::move(lhs);
  s->width = width;
  return s;
}

StmtPtr mk_assume(bv::ExprRef cond) {
  if (cond->width != 1) throw Error("assume condition must have width 1");
  auto s = base(StmtKind::Assume);
  s->expr = std::move(cond);
  return s;
}

StmtPtr mk_assert(std::string label, bv::ExprRef cond) {
  if (cond->width != 1) throw Error("assert condition must have width 1");
  auto s = base(StmtKind::Assert);
  s->label = std::move(label);
  s->expr = std::move(cond);
  return s;
}

StmtPtr mk_if(bv::ExprRef cond, std::vector<StmtPtr> then_stmts,
              std::vector<StmtPtr> else_stmts) {
  if (cond->width != 1) throw Error("branch condition must have width 1");
  auto s = base(StmtKind::If);
  s->expr = std::move(cond);
  s->then_stmts = std::move(then_stmts);
  s->else_stmts = std::move(else_stmts);
  return s;
}

StmtPtr mk_step_mark() { return base(StmtKind::StepMark); }

namespace {

bool acyclic_rec(const std::vector<StmtPtr>& stmts) {
  for (const auto& s : stmts) {
    if (s->kind == StmtKind::Loop) return false;
    if (s->kind == StmtKind::If &&
        (!acyclic_rec(s->then_stmts) || !acyclic_rec(s->else_stmts)))
      return false;
  }
  return true;
}

void labels_rec(const std::vector<StmtPtr>& stmts, std::vector<std::string>& out) {
  for (const auto& s : stmts) {
    switch (s->kind) {
      case StmtKind::Assert: out.push_back(s->label); break;
      case StmtKind::If:
        labels_rec(s->then_stmts, out);
        labels_rec(s->else_stmts, out);
        break;
      case StmtKind::Loop: labels_rec(s->body, out); break;
      default: break;
    }
  }
}

size_t havoc_bits_rec(const std::vector<StmtPtr>& stmts) {
  size_t bits = 0;
  for (const auto& s : stmts) {
    switch (s->kind) {
      case StmtKind::Havoc: bits += s->width; break;
      case StmtKind::If:
        bits += havoc_bits_rec(s->then_stmts) + havoc_bits_rec(s->else_stmts);
        break;
      case StmtKind::Loop: bits += havoc_bits_rec(s->body); break;
      default: break;
    }
  }
  return bits;
}

}  // namespace

size_t count_stmts(const std::vector<StmtPtr>& stmts) {
  size_t n = 0;
  for (const auto& s : stmts) {
    ++n;
    if (s->kind == StmtKind::If)
      n += count_stmts(s->then_stmts) + count_stmts(s->else_stmts);
    else if (s->kind == StmtKind::Loop)
      n += count_stmts(s->body);
  }
  return n;
}

bool Program::acyclic() const { return acyclic_rec(stmts); }
size_t Program::stmt_count() const { return count_stmts(stmts); }

std::vector<std::string> Program::assert_labels() const {
  std::vector<std::string> out;
  labels_rec(stmts, out);
  return out;
}

size_t Program::havoc_bits() const { return havoc_bits_rec(stmts); }

std::string to_string(const Stmt& s, int indent) {
  std::ostringstream os;
  std::string pad(indent * 2, ' ');
  switch (s.kind) {
    case StmtKind::Assign:
      os << pad << s.lhs << " := " << bv::to_string(s.expr) << "\n";
      break;
    case StmtKind::Havoc:
      os << pad << "havoc " << s.lhs << " : " << s.width << "\n";
      break;
    case StmtKind::Assume:
      os << pad << "assume " << bv::to_string(s.expr) << "\n";
      break;
    case StmtKind::Assert:
      os << pad << "assert [" << s.label << "] " << bv::to_string(s.expr) << "\n";
      break;
    case StmtKind::If:
      os << pad << "if " << bv::to_string(s.expr) << " {\n";
      for (const auto& t : s.then_stmts) os << to_string(*t, indent + 1);
      if (!s.else_stmts.empty()) {
        os << pad << "} else {\n";
        for (const auto& e : s.else_stmts) os << to_string(*e, indent + 1);
      }
      os << pad << "}\n";
      break;
    case StmtKind::Loop:
      os << pad << "loop";
      if (s.loop.counted)
        os << " " << s.loop.var << " from " << s.loop.init << " x" << s.loop.trip;
      os << " while " << bv::to_string(s.expr) << " {\n";
      for (const auto& t : s.body) os << to_string(*t, indent + 1);
      os << pad << "}\n";
      break;
    case StmtKind::StepMark:
      os << pad << "-- cycle " << s.cycle << " --\n";
      break;
  }
  return os.str();
}

std::string to_string(const Program& p) {
  std::string out;
  for (const auto& s : p.stmts) out += to_string(*s);
  return out;
}

nlohmann::json stmt_to_json(const Stmt& s) {
  using nlohmann::json;
  json j;
  auto list = [](const std::vector<StmtPtr>& v) {
    json a = json::array();
    for (const auto& s2 : v) a.push_back(stmt_to_json(*s2));
    return a;
  };
  switch (s.kind) {
    case StmtKind::Assign:
      j["k"] = "assign";
      j["lhs"] = s.lhs;
      j["w"] = s.width;
      j["rhs"] = bv::to_json(s.expr);
      break;
    case StmtKind::Havoc:
      j["k"] = "havoc";
      j["lhs"] = s.lhs;
      j["w"] = s.width;
      break;
    case StmtKind::Assume:
      j["k"] = "assume";
      j["cond"] = bv::to_json(s.expr);
      break;
    case StmtKind::Assert:
      j["k"] = "assert";
      j["label"] = s.label;
      j["cond"] = bv::to_json(s.expr);
      break;
    case StmtKind::If:
      j["k"] = "if";
      j["cond"] = bv::to_json(s.expr);
      j["then"] = list(s.then_stmts);
      j["else"] = list(s.else_stmts);
      break;
    case StmtKind::Loop:
      j["k"] = "loop";
      j["cond"] = bv::to_json(s.expr);
      j["body"] = list(s.body);
      if (s.loop.counted) {
        j["var"] = s.loop.var;
        j["init"] = s.loop.init;
        j["step"] = s.loop.step_add;
        j["trip"] = s.loop.trip;
      }
      break;
    case StmtKind::StepMark:
      j["k"] = "step_mark";
      break;
  }
  if (s.cycle >= 0) j["cycle"] = s.cycle;
  return j;
}

StmtPtr stmt_from_json(const nlohmann::json& j) {
  const std::string k = j.at("k").get<std::string>();
  auto list = [](const nlohmann::json& a) {
    std::vector<StmtPtr> v;
    for (const auto& e : a) v.push_back(stmt_from_json(e));
    return v;
  };
  if (k == "assign")
    return mk_assign(j.at("lhs").get<std::string>(), j.at("w").get<unsigned>(),
                     bv::from_json(j.at("rhs")));
  if (k == "havoc")
    return mk_havoc(j.at("lhs").get<std::string>(), j.at("w").get<unsigned>());
  if (k == "assume") return mk_assume(bv::from_json(j.at("cond")));
  if (k == "assert")
    return mk_assert(j.at("label").get<std::string>(), bv::from_json(j.at("cond")));
  if (k == "if")
    return mk_if(bv::from_json(j.at("cond")), list(j.at("then")), list(j.at("else")));
  if (k == "step_mark") return mk_step_mark();
  if (k == "loop") {
    auto s = base(StmtKind::Loop);
    s->expr = bv::from_json(j.at("cond"));
    s->body = list(j.at("body"));
    if (j.contains("var")) {
      s->loop.counted = true;
      s->loop.var = j.at("var").get<std::string>();
      s->loop.init = j.at("init").get<uint64_t>();
      s->loop.step_add = j.at("step").get<uint64_t>();
      s->loop.trip = j.at("trip").get<uint64_t>();
    }
    return s;
  }
  throw Error("unknown statement kind in IR JSON: " + k);
}

namespace {

void flatten_rec(const std::vector<StmtPtr>& stmts, std::vector<Instr>& out) {
  for (const auto& s : stmts) {
    switch (s->kind) {
      case StmtKind::Assign:
        out.push_back(Instr{InstrKind::Assign, s->lhs, s->width, s->expr, "", 0,
                            s->cycle, s.get()});
        break;
      case StmtKind::Havoc:
        out.push_back(Instr{InstrKind::Havoc, s->lhs, s->width, nullptr, "", 0,
                            s->cycle, s.get()});
        break;
      case StmtKind::Assume:
        out.push_back(Instr{InstrKind::Assume, "", 0, s->expr, "", 0, s->cycle,
                            s.get()});
        break;
      case StmtKind::Assert:
        out.push_back(Instr{InstrKind::Assert, "", 0, s->expr, s->label, 0,
                            s->cycle, s.get()});
        break;
      case StmtKind::StepMark:
        out.push_back(Instr{InstrKind::StepMark, "", 0, nullptr, "", 0, s->cycle,
                            s.get()});
        break;
      case StmtKind::If: {
        size_t branch_at = out.size();
        out.push_back(Instr{InstrKind::Branch, "", 0, s->expr, "", 0, s->cycle,
                            s.get()});
        flatten_rec(s->then_stmts, out);
        size_t goto_at = out.size();
        out.push_back(Instr{InstrKind::Goto, "", 0, nullptr, "", 0, s->cycle,
                            s.get()});
        out[branch_at].target = out.size();
        flatten_rec(s->else_stmts, out);
        out[goto_at].target = out.size();
        break;
      }
      case StmtKind::Loop:
        throw Error("internal: cannot flatten a program that still contains loops");
    }
  }
}

}  // namespace

std::vector<Instr> flatten(const Program& p) {
  std::vector<Instr> out;
  flatten_rec(p.stmts, out);
  out.push_back(Instr{InstrKind::End, "", 0, nullptr, "", 0, -1, nullptr});
  return out;
}

}  // namespace coverif::ir
