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

#include <sstream>

#include "uil/text.hpp"

namespace uil {
namespace {

int precedence(const GuardExpr& e) {
  switch (e.kind) {
    case GuardExpr::Kind::kOr:
      return 1;
    case GuardExpr::Kind::kAnd:
      return 2;
    case GuardExpr::Kind::kNot:
      return 3;
    case GuardExpr::Kind::kCmp:
      return 4;
    default:
      return 5;
  }
}

std::string guard_expr_str(const GuardExpr& e) {
  auto wrap = [](const GuardExpr& child, bool paren) {
    std::string s = guard_expr_str(child);
    return paren ? "(" + s + ")" : s;
  };
  switch (e.kind) {
    case GuardExpr::Kind::kTrue:
      return "1'd1";
    case GuardExpr::Kind::kPort:
      return e.port.str();
    case GuardExpr::Kind::kNot:
      return "!" + wrap(e.children[0], precedence(e.children[0]) < 4);
    case GuardExpr::Kind::kAnd:
    case GuardExpr::Kind::kOr: {
      int p = precedence(e);
      const char* op = e.kind == GuardExpr::Kind::kAnd ? " & " : " | ";
      return wrap(e.children[0], precedence(e.children[0]) < p) + op +
             wrap(e.children[1], precedence(e.children[1]) <= p);
    }
    case GuardExpr::Kind::kCmp:
      return atom_str(e.operands[0]) + " " + cmp_op_str(e.op) + " " +
             atom_str(e.operands[1]);
  }
  return "";
}

std::string attrs_str(const Attributes& attrs) {
  std::string s;
  for (const auto& [k, v] : attrs) s += "@" + k + "(" + std::to_string(v) + ") ";
  return s;
}

std::string pad(int indent) { return std::string(2 * indent, ' '); }

void print_control_into(std::ostringstream& out, const Control& c,
                        int indent);

void print_body(std::ostringstream& out, const Control& body, int indent) {
  out << "{\n";
  if (body.kind != Control::Kind::kEmpty)
    print_control_into(out, body, indent + 1);
  out << pad(indent) << "}";
}

std::string bindings_str(const std::vector<Binding>& bs) {
  std::string s = "(";
  for (size_t i = 0; i < bs.size(); ++i) {
    if (i) s += ", ";
    s += bs[i].port + " = " + atom_str(bs[i].value);
  }
  return s + ")";
}

void print_control_into(std::ostringstream& out, const Control& c,
                        int indent) {
  using K = Control::Kind;
  out << pad(indent) << attrs_str(c.attrs);
  if (c.is_static() && c.kind != K::kStaticEnable) {
    out << "static";
    if (c.latency) out << "<" << *c.latency << ">";
    out << " ";
  }
  switch (c.kind) {
    case K::kEmpty:
      out << "seq {}\n";
      return;
    case K::kEnable:
    case K::kStaticEnable:
      out << c.name << ";\n";
      return;
    case K::kSeq:
    case K::kPar:
    case K::kStaticSeq:
    case K::kStaticPar: {
      bool seq = c.kind == K::kSeq || c.kind == K::kStaticSeq;
      out << (seq ? "seq {\n" : "par {\n");
      for (const Control& child : c.children)
        print_control_into(out, child, indent + 1);
      out << pad(indent) << "}\n";
      return;
    }
    case K::kIf:
    case K::kStaticIf:
      out << "if " << c.cond.str() << " ";
      print_body(out, c.children[0], indent);
      if (c.children[1].kind != K::kEmpty) {
        out << " else ";
        print_body(out, c.children[1], indent);
      }
      out << "\n";
      return;
    case K::kWhile:
      out << "while " << c.cond.str() << " ";
      print_body(out, c.children[0], indent);
      out << "\n";
      return;
    case K::kRepeat:
    case K::kStaticRepeat:
      out << "repeat " << c.count << " ";
      print_body(out, c.children[0], indent);
      out << "\n";
      return;
    case K::kInvoke:
    case K::kStaticInvoke:
      out << "invoke " << c.name << bindings_str(c.bindings) << ";\n";
      return;
  }
}

void print_assignments(std::ostringstream& out,
                       const std::vector<Assignment>& as, int indent) {
  for (const Assignment& a : as)
    out << pad(indent) << print_assignment(a) << "\n";
}

std::string ports_str(const Component& comp, Direction dir) {
  std::string s = "(";
  bool first = true;
  for (const PortDef& p : comp.ports) {
    if (p.dir != dir || p.role == PortRole::kGo || p.role == PortRole::kDone)
      continue;
    if (!first) s += ", ";
    first = false;
    s += p.name + ": " + std::to_string(p.width);
  }
  return s + ")";
}

}  // namespace

std::string print_guard(const Guard& g) {
  std::string s;
  if (g.timing) {
    s = "%[" + std::to_string(g.timing->begin) + ":" +
        std::to_string(g.timing->end) + "]";
  }
  if (!g.cond.is_true()) {
    std::string c = guard_expr_str(g.cond);
    // Timing binds as a conjunct, so a top-level `|` needs parentheses.
    if (g.timing && g.cond.kind == GuardExpr::Kind::kOr) c = "(" + c + ")";
    s = s.empty() ? c : s + " & " + c;
  }
  return s;
}

std::string print_assignment(const Assignment& a) {
  std::string g = print_guard(a.guard);
  return a.dst.str() + " = " + (g.empty() ? "" : g + " ? ") +
         atom_str(a.src) + ";";
}

std::string print_control(const Control& control, int indent) {
  std::ostringstream out;
  print_control_into(out, control, indent);
  return out.str();
}

std::string print_component(const Program& prog, const Component& comp) {
  std::ostringstream out;
  Attributes attrs = comp.attrs;
  if (!prog.components.empty() && prog.entry != prog.components.back().name &&
      prog.entry == comp.name)
    attrs["toplevel"] = 1;
  out << attrs_str(attrs);
  if (comp.latency) out << "static<" << *comp.latency << "> ";
  out << "component " << comp.name << ports_str(comp, Direction::kInput)
      << " -> " << ports_str(comp, Direction::kOutput) << " {\n";
  out << "  cells {" << (comp.cells.empty() ? "" : "\n");
  for (const Cell& c : comp.cells) {
    out << "    " << attrs_str(c.attrs) << c.name << " = " << c.prototype
        << "(";
    for (size_t i = 0; i < c.args.size(); ++i)
      out << (i ? ", " : "") << c.args[i];
    out << ");\n";
  }
  out << (comp.cells.empty() ? "}\n" : "  }\n");
  bool no_wires = comp.groups.empty() && comp.static_groups.empty() &&
                  comp.continuous.empty();
  out << "  wires {" << (no_wires ? "}\n" : "\n");
  for (const Group& g : comp.groups) {
    out << "    " << attrs_str(g.attrs) << "group " << g.name << " {\n";
    print_assignments(out, g.assignments, 3);
    out << "    }\n";
  }
  for (const StaticGroup& g : comp.static_groups) {
    out << "    " << attrs_str(g.attrs) << "static<" << g.latency
        << "> group " << g.name << " {\n";
    print_assignments(out, g.assignments, 3);
    out << "    }\n";
  }
  print_assignments(out, comp.continuous, 2);
  if (!no_wires) out << "  }\n";
  if (comp.control.kind == Control::Kind::kEmpty) {
    out << "  control {}\n";
  } else {
    out << "  control {\n";
    print_control_into(out, comp.control, 2);
    out << "  }\n";
  }
  out << "}\n";
  return out.str();
}

std::string print(const Program& prog) {
  std::ostringstream out;
  if (prog.import_primitives) out << "import \"primitives\";\n\n";
  for (size_t i = 0; i < prog.components.size(); ++i) {
    if (i) out << "\n";
    out << print_component(prog, prog.components[i]);
  }
  return out.str();
}

}  // namespace uil
