// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>

#include "coverif/bv.hpp"

namespace coverif::bv {

// JSON form used by the IR schema (see README):
//   {"k":"var","name":"top.a.q","ver":0,"w":3}
//   {"k":"const","val":5,"w":3}
//   {"k":"extract","hi":7,"lo":5,"w":3,"a":...}
//   {"k":"add","w":8,"a":...,"b":...}
nlohmann::json to_json(const ExprRef& e);
ExprRef from_json(const nlohmann::json& j);

}  // namespace coverif::bv
