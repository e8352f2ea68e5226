// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "coverif/bv_json.hpp"

#include <unordered_map>

namespace coverif::bv {

using nlohmann::json;

json to_json(const ExprRef& e) {
  json j;
  j["k"] = op_name(e->op);
  j["w"] = e->width;
  switch (e->op) {
    case Op::Var:
      j["name"] = e->name;
      j["ver"] = e->version;
      break;
    case Op::Const:
      j["val"] = e->value;
      break;
    case Op::Extract:
      j["hi"] = e->hi;
      j["lo"] = e->lo;
      j["a"] = to_json(e->a);
      break;
    default:
      if (e->a) j["a"] = to_json(e->a);
      if (e->b) j["b"] = to_json(e->b);
      if (e->c) j["c"] = to_json(e->c);
      break;
  }
  return j;
}

namespace {
Op op_from_name(const std::string& k) {
  static const std::unordered_map<std::string, Op> table = {
      {"var", Op::Var},       {"const", Op::Const},   {"not", Op::Not},
      {"and", Op::And},       {"or", Op::Or},         {"xor", Op::Xor},
      {"neg", Op::Neg},       {"add", Op::Add},       {"sub", Op::Sub},
      {"mul", Op::Mul},       {"shl", Op::Shl},       {"lshr", Op::Lshr},
      {"eq", Op::Eq},         {"ult", Op::Ult},       {"ule", Op::Ule},
      {"slt", Op::Slt},       {"ite", Op::Ite},       {"extract", Op::Extract},
      {"concat", Op::Concat}, {"zext", Op::Zext},     {"sext", Op::Sext},
      {"redor", Op::RedOr},   {"redand", Op::RedAnd}, {"redxor", Op::RedXor},
  };
  auto it = table.find(k);
  if (it == table.end()) throw Error("unknown expression kind in IR JSON: " + k);
  return it->second;
}
}  // namespace

ExprRef from_json(const json& j) {
  Op op = op_from_name(j.at("k").get<std::string>());
  unsigned w = j.at("w").get<unsigned>();
  switch (op) {
    case Op::Var:
      return var(j.at("name").get<std::string>(), j.at("ver").get<unsigned>(), w);
    case Op::Const:
      return constant(j.at("val").get<uint64_t>(), w);
    case Op::Extract:
      return extract(from_json(j.at("a")), j.at("hi").get<unsigned>(),
                     j.at("lo").get<unsigned>());
    case Op::Ite:
      return ite(from_json(j.at("a")), from_json(j.at("b")), from_json(j.at("c")));
    case Op::Zext:
      return zext(from_json(j.at("a")), w);
    case Op::Sext:
      return sext(from_json(j.at("a")), w);
    case Op::Not:
      return bv_not(from_json(j.at("a")));
    case Op::Neg:
      return neg(from_json(j.at("a")));
    case Op::RedOr:
      return redor(from_json(j.at("a")));
    case Op::RedAnd:
      return redand(from_json(j.at("a")));
    case Op::RedXor:
      return redxor(from_json(j.at("a")));
    case Op::And:
      return bv_and(from_json(j.at("a")), from_json(j.at("b")));
    case Op::Or:
      return bv_or(from_json(j.at("a")), from_json(j.at("b")));
    case Op::Xor:
      return bv_xor(from_json(j.at("a")), from_json(j.at("b")));
    case Op::Add:
      return add(from_json(j.at("a")), from_json(j.at("b")));
    case Op::Sub:
      return sub(from_json(j.at("a")), from_json(j.at("b")));
    case Op::Mul:
      return mul(from_json(j.at("a")), from_json(j.at("b")));
    case Op::Shl:
      return shl(from_json(j.at("a")), from_json(j.at("b")));
    case Op::Lshr:
      return lshr(from_json(j.at("a")), from_json(j.at("b")));
    case Op::Eq:
      return eq(from_json(j.at("a")), from_json(j.at("b")));
    case Op::Ult:
      return ult(from_json(j.at("a")), from_json(j.at("b")));
    case Op::Ule:
      return ule(from_json(j.at("a")), from_json(j.at("b")));
    case Op::Slt:
      return slt(from_json(j.at("a")), from_json(j.at("b")));
    case Op::Concat:
      return concat(from_json(j.at("a")), from_json(j.at("b")));
  }
  throw Error("unreachable expression kind");
}

}  // namespace coverif::bv
