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

#include "uil/ir.hpp"

#include <stdexcept>

#include "uil/primitives.hpp"

namespace uil {

std::string SourceSpan::str() const {
  std::string s = file.empty() ? "<input>" : file;
  return s + ":" + std::to_string(line) + ":" + std::to_string(col_begin);
}

std::string PortRef::str() const {
  switch (kind) {
    case Kind::kThis:
      return port;
    case Kind::kCell:
      return parent + "." + port;
    case Kind::kHole:
      return parent + "[" + port + "]";
  }
  return port;
}

std::string atom_str(const Atom& atom) {
  if (const PortRef* p = as_port(atom)) return p->str();
  const Constant& c = std::get<Constant>(atom);
  if (c.width) return std::to_string(*c.width) + "'d" + std::to_string(c.value);
  return std::to_string(c.value);
}

const char* cmp_op_str(CmpOp op) {
  switch (op) {
    case CmpOp::kEq: return "==";
    case CmpOp::kNeq: return "!=";
    case CmpOp::kLt: return "<";
    case CmpOp::kGt: return ">";
    case CmpOp::kLe: return "<=";
    case CmpOp::kGe: return ">=";
  }
  return "?";
}

GuardExpr GuardExpr::Port(PortRef p) {
  GuardExpr e;
  e.kind = Kind::kPort;
  e.port = std::move(p);
  return e;
}

GuardExpr GuardExpr::Not(GuardExpr inner) {
  GuardExpr e;
  e.kind = Kind::kNot;
  e.children.push_back(std::move(inner));
  return e;
}

GuardExpr GuardExpr::And(GuardExpr a, GuardExpr b) {
  GuardExpr e;
  e.kind = Kind::kAnd;
  e.children.push_back(std::move(a));
  e.children.push_back(std::move(b));
  return e;
}

GuardExpr GuardExpr::Or(GuardExpr a, GuardExpr b) {
  GuardExpr e;
  e.kind = Kind::kOr;
  e.children.push_back(std::move(a));
  e.children.push_back(std::move(b));
  return e;
}

GuardExpr GuardExpr::Cmp(CmpOp op, Atom lhs, Atom rhs) {
  GuardExpr e;
  e.kind = Kind::kCmp;
  e.op = op;
  e.operands.push_back(std::move(lhs));
  e.operands.push_back(std::move(rhs));
  return e;
}

GuardExpr conjoin(GuardExpr a, GuardExpr b) {
  if (a.is_true()) return b;
  if (b.is_true()) return a;
  return GuardExpr::And(std::move(a), std::move(b));
}

Control Control::Enable(std::string group) {
  Control c;
  c.kind = Kind::kEnable;
  c.name = std::move(group);
  return c;
}

Control Control::StaticEnable(std::string group) {
  Control c;
  c.kind = Kind::kStaticEnable;
  c.name = std::move(group);
  return c;
}

static Control make_list(Control::Kind kind, std::vector<Control> children) {
  Control c;
  c.kind = kind;
  c.children = std::move(children);
  return c;
}

Control Control::Seq(std::vector<Control> ch) {
  return make_list(Kind::kSeq, std::move(ch));
}
Control Control::Par(std::vector<Control> ch) {
  return make_list(Kind::kPar, std::move(ch));
}
Control Control::StaticSeq(std::vector<Control> ch) {
  return make_list(Kind::kStaticSeq, std::move(ch));
}
Control Control::StaticPar(std::vector<Control> ch) {
  return make_list(Kind::kStaticPar, std::move(ch));
}

Control Control::If(PortRef cond, Control then, Control otherwise) {
  Control c = make_list(Kind::kIf, {std::move(then), std::move(otherwise)});
  c.cond = std::move(cond);
  return c;
}

Control Control::StaticIf(PortRef cond, Control then, Control otherwise) {
  Control c =
      make_list(Kind::kStaticIf, {std::move(then), std::move(otherwise)});
  c.cond = std::move(cond);
  return c;
}

Control Control::While(PortRef cond, Control body) {
  Control c = make_list(Kind::kWhile, {std::move(body)});
  c.cond = std::move(cond);
  return c;
}

Control Control::Repeat(uint64_t count, Control body) {
  Control c = make_list(Kind::kRepeat, {std::move(body)});
  c.count = count;
  return c;
}

Control Control::StaticRepeat(uint64_t count, Control body) {
  Control c = make_list(Kind::kStaticRepeat, {std::move(body)});
  c.count = count;
  return c;
}

Control Control::Invoke(std::string cell, std::vector<Binding> bindings) {
  Control c;
  c.kind = Kind::kInvoke;
  c.name = std::move(cell);
  c.bindings = std::move(bindings);
  return c;
}

Control Control::StaticInvoke(std::string cell, std::vector<Binding> bindings) {
  Control c = Invoke(std::move(cell), std::move(bindings));
  c.kind = Kind::kStaticInvoke;
  return c;
}

bool Control::is_static() const {
  switch (kind) {
    case Kind::kStaticEnable:
    case Kind::kStaticSeq:
    case Kind::kStaticPar:
    case Kind::kStaticIf:
    case Kind::kStaticRepeat:
    case Kind::kStaticInvoke:
      return true;
    default:
      return false;
  }
}

const char* control_kind_str(Control::Kind kind) {
  using K = Control::Kind;
  switch (kind) {
    case K::kEmpty: return "empty";
    case K::kEnable: return "enable";
    case K::kStaticEnable: return "static enable";
    case K::kSeq: return "seq";
    case K::kPar: return "par";
    case K::kIf: return "if";
    case K::kWhile: return "while";
    case K::kRepeat: return "repeat";
    case K::kStaticSeq: return "static seq";
    case K::kStaticPar: return "static par";
    case K::kStaticIf: return "static if";
    case K::kStaticRepeat: return "static repeat";
    case K::kInvoke: return "invoke";
    case K::kStaticInvoke: return "static invoke";
  }
  return "?";
}

const PortDef* Component::find_port(const std::string& n) const {
  for (const PortDef& p : ports)
    if (p.name == n) return &p;
  return nullptr;
}

const Cell* Component::find_cell(const std::string& n) const {
  for (const Cell& c : cells)
    if (c.name == n) return &c;
  return nullptr;
}

Cell* Component::find_cell(const std::string& n) {
  for (Cell& c : cells)
    if (c.name == n) return &c;
  return nullptr;
}

const Group* Component::find_group(const std::string& n) const {
  for (const Group& g : groups)
    if (g.name == n) return &g;
  return nullptr;
}

Group* Component::find_group(const std::string& n) {
  for (Group& g : groups)
    if (g.name == n) return &g;
  return nullptr;
}

const StaticGroup* Component::find_static_group(const std::string& n) const {
  for (const StaticGroup& g : static_groups)
    if (g.name == n) return &g;
  return nullptr;
}

StaticGroup* Component::find_static_group(const std::string& n) {
  for (StaticGroup& g : static_groups)
    if (g.name == n) return &g;
  return nullptr;
}

bool Component::has_name(const std::string& n) const {
  return find_cell(n) || find_group(n) || find_static_group(n) ||
         find_port(n);
}

void Component::add_interface_ports() {
  std::erase_if(ports, [](const PortDef& p) {
    return p.role == PortRole::kGo || p.role == PortRole::kDone;
  });
  ports.push_back({"go", 1, Direction::kInput, PortRole::kGo, {}});
  if (!is_static())
    ports.push_back({"done", 1, Direction::kOutput, PortRole::kDone, {}});
}

const PrimitiveDecl::Port* PrimitiveDecl::find_port(
    const std::string& n) const {
  for (const Port& p : ports)
    if (p.name == n) return &p;
  return nullptr;
}

const PrimitiveDecl::Port* PrimitiveDecl::port_with_role(PortRole role) const {
  for (const Port& p : ports)
    if (p.role == role) return &p;
  return nullptr;
}

const Component* Program::find_component(const std::string& n) const {
  for (const Component& c : components)
    if (c.name == n) return &c;
  return nullptr;
}

Component* Program::find_component(const std::string& n) {
  for (Component& c : components)
    if (c.name == n) return &c;
  return nullptr;
}

const PrimitiveDecl* Program::find_primitive(const std::string& n) const {
  for (const PrimitiveDecl& p : externs)
    if (p.name == n) return &p;
  return find_builtin_primitive(n);
}

const Component& Program::entry_component() const {
  const Component* c = find_component(entry);
  if (!c) throw std::runtime_error("entry component '" + entry + "' missing");
  return *c;
}

static std::optional<uint32_t> eval_width(const PrimitiveDecl& prim,
                                          const WidthExpr& w,
                                          const std::vector<uint64_t>& args) {
  if (w.param.empty()) return w.literal;
  for (size_t i = 0; i < prim.params.size(); ++i) {
    if (prim.params[i] == w.param) {
      if (i >= args.size()) return std::nullopt;
      return static_cast<uint32_t>(args[i]);
    }
  }
  return std::nullopt;
}

std::optional<uint32_t> cell_port_width(const Program& prog, const Cell& cell,
                                        const std::string& port) {
  if (const PrimitiveDecl* prim = prog.find_primitive(cell.prototype)) {
    const PrimitiveDecl::Port* p = prim->find_port(port);
    if (!p) return std::nullopt;
    return eval_width(*prim, p->width, cell.args);
  }
  if (const Component* comp = prog.find_component(cell.prototype)) {
    if (const PortDef* p = comp->find_port(port)) return p->width;
  }
  return std::nullopt;
}

std::optional<Direction> cell_port_dir(const Program& prog, const Cell& cell,
                                       const std::string& port) {
  if (const PrimitiveDecl* prim = prog.find_primitive(cell.prototype)) {
    if (const PrimitiveDecl::Port* p = prim->find_port(port)) return p->dir;
    return std::nullopt;
  }
  if (const Component* comp = prog.find_component(cell.prototype)) {
    if (const PortDef* p = comp->find_port(port)) return p->dir;
  }
  return std::nullopt;
}

std::optional<std::string> cell_role_port(const Program& prog,
                                          const Cell& cell, PortRole role) {
  if (const PrimitiveDecl* prim = prog.find_primitive(cell.prototype)) {
    if (const PrimitiveDecl::Port* p = prim->port_with_role(role))
      return p->name;
    return std::nullopt;
  }
  if (const Component* comp = prog.find_component(cell.prototype)) {
    for (const PortDef& p : comp->ports)
      if (p.role == role) return p.name;
  }
  return std::nullopt;
}

std::optional<Cycles> callee_latency(const Program& prog, const Cell& cell) {
  if (const PrimitiveDecl* prim = prog.find_primitive(cell.prototype))
    return prim->latency;
  if (const Component* comp = prog.find_component(cell.prototype))
    return comp->latency;
  return std::nullopt;
}

void collect_reads(const GuardExpr& e, std::vector<PortRef>& out) {
  switch (e.kind) {
    case GuardExpr::Kind::kTrue:
      return;
    case GuardExpr::Kind::kPort:
      out.push_back(e.port);
      return;
    case GuardExpr::Kind::kCmp:
      for (const Atom& a : e.operands)
        if (const PortRef* p = as_port(a)) out.push_back(*p);
      return;
    default:
      for (const GuardExpr& c : e.children) collect_reads(c, out);
  }
}

void collect_reads(const Assignment& a, std::vector<PortRef>& out) {
  if (const PortRef* p = as_port(a.src)) out.push_back(*p);
  collect_reads(a.guard.cond, out);
}

std::string fresh_name(const Component& comp, const std::string& base) {
  if (!comp.has_name(base)) return base;
  for (int i = 1;; ++i) {
    std::string n = base + "_" + std::to_string(i);
    if (!comp.has_name(n)) return n;
  }
}

uint32_t bits_for(uint64_t count) {
  uint32_t bits = 1;
  while (bits < 64 && (uint64_t{1} << bits) < count) ++bits;
  return bits;
}

}  // namespace uil
