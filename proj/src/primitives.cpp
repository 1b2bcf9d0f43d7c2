// Copyright 2026 The UIL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "uil/primitives.hpp"

#include <bit>
#include <map>

namespace uil {
namespace {

using Port = PrimitiveDecl::Port;

Port in(std::string name, std::string w, PortRole role = PortRole::kNone) {
  return {std::move(name), {std::move(w), 0}, Direction::kInput, role};
}
Port in1(std::string name, PortRole role = PortRole::kNone) {
  return {std::move(name), {"", 1}, Direction::kInput, role};
}
Port out(std::string name, std::string w) {
  return {std::move(name), {std::move(w), 0}, Direction::kOutput,
          PortRole::kNone};
}
Port out1(std::string name, PortRole role = PortRole::kNone) {
  return {std::move(name), {"", 1}, Direction::kOutput, role};
}

PrimitiveDecl binary(std::string name, bool bool_out) {
  PrimitiveDecl p;
  p.name = std::move(name);
  p.params = {"W"};
  p.ports = {in("left", "W"), in("right", "W"),
             bool_out ? out1("out") : out("out", "W")};
  p.model = StateModel::kCombinational;
  p.shareable = true;
  return p;
}

PrimitiveDecl unary(std::string name) {
  PrimitiveDecl p;
  p.name = std::move(name);
  p.params = {"W"};
  p.ports = {in("in", "W"), out("out", "W")};
  p.model = StateModel::kCombinational;
  p.shareable = true;
  return p;
}

struct Library {
  std::vector<PrimitiveDecl> decls;
  std::map<std::string, PrimKind> kinds;

  void add(PrimitiveDecl d, PrimKind k) {
    kinds[d.name] = k;
    decls.push_back(std::move(d));
  }
};

Library build_library() {
  Library lib;
  lib.add(binary("std_add", false), PrimKind::kAdd);
  lib.add(binary("std_sub", false), PrimKind::kSub);
  lib.add(binary("std_and", false), PrimKind::kAnd);
  lib.add(binary("std_or", false), PrimKind::kOr);
  lib.add(binary("std_xor", false), PrimKind::kXor);
  lib.add(binary("std_lsh", false), PrimKind::kLsh);
  lib.add(binary("std_rsh", false), PrimKind::kRsh);
  lib.add(binary("std_lt", true), PrimKind::kLt);
  lib.add(binary("std_gt", true), PrimKind::kGt);
  lib.add(binary("std_eq", true), PrimKind::kEq);
  lib.add(binary("std_neq", true), PrimKind::kNeq);
  lib.add(binary("std_le", true), PrimKind::kLe);
  lib.add(binary("std_ge", true), PrimKind::kGe);
  lib.add(unary("std_not"), PrimKind::kNot);
  {
    PrimitiveDecl w = unary("std_wire");
    w.shareable = false;
    lib.add(std::move(w), PrimKind::kWire);
  }
  {
    PrimitiveDecl r;
    r.name = "std_reg";
    r.params = {"W"};
    r.ports = {in("in", "W"), in1("write_en", PortRole::kGo), out("out", "W"),
               out1("done", PortRole::kDone)};
    r.done_latency = 1;
    r.model = StateModel::kRegistered;
    r.shareable = true;
    lib.add(std::move(r), PrimKind::kReg);
  }
  {
    PrimitiveDecl m;
    m.name = "std_mem_d1";
    m.params = {"W", "SIZE", "IDX"};
    m.ports = {in("addr0", "IDX"), in("write_data", "W"),
               in1("write_en", PortRole::kGo), out("read_data", "W"),
               out1("done", PortRole::kDone)};
    m.done_latency = 1;
    m.model = StateModel::kRegistered;
    lib.add(std::move(m), PrimKind::kMemD1);
  }
  {
    PrimitiveDecl m;
    m.name = "std_mult";
    m.params = {"W"};
    m.ports = {in1("go", PortRole::kGo), in("left", "W"), in("right", "W"),
               out("out", "W")};
    m.latency = 3;
    m.model = StateModel::kRegistered;
    m.shareable = true;
    lib.add(std::move(m), PrimKind::kMultStatic);
  }
  {
    PrimitiveDecl a;
    a.name = "std_add_pipe";
    a.params = {"W"};
    a.ports = {in1("go", PortRole::kGo), in("left", "W"), in("right", "W"),
               out("out", "W")};
    a.latency = 1;
    a.model = StateModel::kRegistered;
    a.shareable = true;
    lib.add(std::move(a), PrimKind::kAddPipe);
  }
  {
    PrimitiveDecl m;
    m.name = "std_mult_pipe";
    m.params = {"W"};
    m.ports = {in1("go", PortRole::kGo), in("left", "W"), in("right", "W"),
               out("out", "W"), out1("done", PortRole::kDone)};
    m.done_latency = 3;
    m.model = StateModel::kDynamic;
    m.shareable = true;
    lib.add(std::move(m), PrimKind::kMultPipe);
  }
  {
    PrimitiveDecl d;
    d.name = "std_div";
    d.params = {"W"};
    d.ports = {in1("go", PortRole::kGo), in("left", "W"), in("right", "W"),
               out("out", "W"), out1("done", PortRole::kDone)};
    d.model = StateModel::kDynamic;
    d.shareable = true;
    lib.add(std::move(d), PrimKind::kDiv);
  }
  return lib;
}

const Library& library() {
  static const Library lib = build_library();
  return lib;
}

}  // namespace

const std::vector<PrimitiveDecl>& builtin_primitives() {
  return library().decls;
}

const PrimitiveDecl* find_builtin_primitive(const std::string& name) {
  for (const PrimitiveDecl& d : library().decls)
    if (d.name == name) return &d;
  return nullptr;
}

std::optional<PrimKind> primitive_kind(const std::string& name) {
  auto it = library().kinds.find(name);
  if (it == library().kinds.end()) return std::nullopt;
  return it->second;
}

bool is_combinational(PrimKind kind) {
  switch (kind) {
    case PrimKind::kReg:
    case PrimKind::kMemD1:
    case PrimKind::kMultStatic:
    case PrimKind::kAddPipe:
    case PrimKind::kMultPipe:
    case PrimKind::kDiv:
      return false;
    default:
      return true;
  }
}

Cycles divider_latency(uint64_t dividend, uint64_t divisor) {
  if (divisor == 0) return 1;
  Cycles bits = static_cast<Cycles>(std::bit_width(dividend));
  return bits == 0 ? 1 : bits;
}

}  // namespace uil
