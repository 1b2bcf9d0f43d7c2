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

#ifndef UIL_IR_HPP_
#define UIL_IR_HPP_

// Abstract syntax of the unified static/dynamic hardware IL.
//
// A Program is a list of components plus the builtin primitive library. Each
// Component has cells (instances of primitives or other components), wires
// (dynamic groups, static groups and continuous assignments) and a control
// tree. All types are plain values; copying a Component deep-copies it.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace uil {

using Cycles = uint64_t;

// Source location. Spans are metadata: they never participate in equality so
// that a reparsed program compares equal to the one that was printed.
struct SourceSpan {
  std::string file;
  int line = 0;
  int col_begin = 0;
  int col_end = 0;

  bool operator==(const SourceSpan&) const { return true; }
  std::string str() const;
};

// Attribute map, e.g. `@static(3)` is {"static", 3}.
using Attributes = std::map<std::string, uint64_t>;

inline constexpr const char* kStaticHint = "static";
inline constexpr const char* kPromotedAttr = "promoted";
inline constexpr const char* kWrapperAttr = "wrapper";
inline constexpr const char* kDelayPrefix = "__delay_";

enum class Direction { kInput, kOutput };
enum class PortRole { kNone, kGo, kDone, kClk, kReset };

struct PortRef {
  enum class Kind {
    kThis,  // port of the enclosing component, `out`
    kCell,  // port of a cell, `add.left`
    kHole,  // group interface signal, `g[go]` / `g[done]`
  };
  Kind kind = Kind::kThis;
  std::string parent;  // cell or group name; empty for kThis
  std::string port;

  static PortRef This(std::string port) {
    return {Kind::kThis, "", std::move(port)};
  }
  static PortRef Cell(std::string cell, std::string port) {
    return {Kind::kCell, std::move(cell), std::move(port)};
  }
  static PortRef Go(std::string group) {
    return {Kind::kHole, std::move(group), "go"};
  }
  static PortRef Done(std::string group) {
    return {Kind::kHole, std::move(group), "done"};
  }

  bool is_hole() const { return kind == Kind::kHole; }
  bool operator==(const PortRef&) const = default;
  bool operator<(const PortRef& o) const {
    if (kind != o.kind) return kind < o.kind;
    if (parent != o.parent) return parent < o.parent;
    return port < o.port;
  }
  std::string str() const;
};

// Integer literal. An unsized literal (`1`) takes the width of the port it is
// compared with or assigned to.
struct Constant {
  uint64_t value = 0;
  std::optional<uint32_t> width;
  bool operator==(const Constant&) const = default;
};

using Atom = std::variant<PortRef, Constant>;

std::string atom_str(const Atom& atom);
inline const PortRef* as_port(const Atom& a) { return std::get_if<PortRef>(&a); }

enum class CmpOp { kEq, kNeq, kLt, kGt, kLe, kGe };
const char* cmp_op_str(CmpOp op);

// Boolean guard expression without timing.
struct GuardExpr {
  enum class Kind { kTrue, kPort, kNot, kAnd, kOr, kCmp };
  Kind kind = Kind::kTrue;
  PortRef port;                     // kPort
  CmpOp op = CmpOp::kEq;            // kCmp
  std::vector<Atom> operands;       // kCmp: exactly two
  std::vector<GuardExpr> children;  // kNot: one, kAnd/kOr: two

  static GuardExpr True() { return {}; }
  static GuardExpr Port(PortRef p);
  static GuardExpr Not(GuardExpr e);
  static GuardExpr And(GuardExpr a, GuardExpr b);
  static GuardExpr Or(GuardExpr a, GuardExpr b);
  static GuardExpr Cmp(CmpOp op, Atom lhs, Atom rhs);

  bool is_true() const { return kind == Kind::kTrue; }
  bool operator==(const GuardExpr&) const = default;
};

// Conjunction with `GuardExpr::True()` folded away.
GuardExpr conjoin(GuardExpr a, GuardExpr b);

// Half-open cycle interval [begin, end) relative to the start of the
// enclosing static group.
struct Interval {
  Cycles begin = 0;
  Cycles end = 0;
  bool operator==(const Interval&) const = default;
};

struct Guard {
  std::optional<Interval> timing;
  GuardExpr cond;

  bool is_true() const { return !timing && cond.is_true(); }
  bool operator==(const Guard&) const = default;
};

struct Assignment {
  PortRef dst;
  Atom src;
  Guard guard;
  SourceSpan span;
  bool operator==(const Assignment&) const = default;
};

struct Group {
  std::string name;
  std::vector<Assignment> assignments;
  Attributes attrs;
  SourceSpan span;
  bool operator==(const Group&) const = default;
};

struct StaticGroup {
  std::string name;
  Cycles latency = 1;
  std::vector<Assignment> assignments;
  Attributes attrs;
  SourceSpan span;
  bool operator==(const StaticGroup&) const = default;
};

struct Binding {
  std::string port;
  Atom value;
  bool operator==(const Binding&) const = default;
};

struct Control {
  enum class Kind {
    kEmpty,
    kEnable,
    kStaticEnable,
    kSeq,
    kPar,
    kIf,
    kWhile,
    kRepeat,
    kStaticSeq,
    kStaticPar,
    kStaticIf,
    kStaticRepeat,
    kInvoke,
    kStaticInvoke,
  };
  Kind kind = Kind::kEmpty;
  std::string name;               // group (enables) or cell (invokes)
  PortRef cond;                   // if / while / static if
  uint64_t count = 0;             // repeat / static repeat
  std::vector<Control> children;  // if: {then, else}; while/repeat: {body}
  std::vector<Binding> bindings;  // invokes
  std::optional<Cycles> latency;  // declared `static<n>` latency, optional
  Attributes attrs;
  SourceSpan span;

  static Control Empty() { return {}; }
  static Control Enable(std::string group);
  static Control StaticEnable(std::string group);
  static Control Seq(std::vector<Control> children);
  static Control Par(std::vector<Control> children);
  static Control StaticSeq(std::vector<Control> children);
  static Control StaticPar(std::vector<Control> children);
  static Control If(PortRef cond, Control then, Control otherwise);
  static Control StaticIf(PortRef cond, Control then, Control otherwise);
  static Control While(PortRef cond, Control body);
  static Control Repeat(uint64_t count, Control body);
  static Control StaticRepeat(uint64_t count, Control body);
  static Control Invoke(std::string cell, std::vector<Binding> bindings);
  static Control StaticInvoke(std::string cell, std::vector<Binding> bindings);

  bool is_static() const;
  bool operator==(const Control&) const = default;
};

const char* control_kind_str(Control::Kind kind);

struct PortDef {
  std::string name;
  uint32_t width = 1;
  Direction dir = Direction::kInput;
  PortRole role = PortRole::kNone;  // implicit go / done ports carry a role
  SourceSpan span;
  bool operator==(const PortDef&) const = default;
};

struct Cell {
  std::string name;
  std::string prototype;
  std::vector<uint64_t> args;
  Attributes attrs;
  SourceSpan span;
  bool operator==(const Cell&) const = default;
};

struct Component {
  std::string name;
  std::vector<PortDef> ports;  // includes implicit go (and done if dynamic)
  std::vector<Cell> cells;
  std::vector<Assignment> continuous;
  std::vector<Group> groups;
  std::vector<StaticGroup> static_groups;
  Control control;
  Attributes attrs;
  std::optional<Cycles> latency;  // set for `static<n> component`
  SourceSpan span;

  bool is_static() const { return latency.has_value(); }

  const PortDef* find_port(const std::string& n) const;
  const Cell* find_cell(const std::string& n) const;
  Cell* find_cell(const std::string& n);
  const Group* find_group(const std::string& n) const;
  Group* find_group(const std::string& n);
  const StaticGroup* find_static_group(const std::string& n) const;
  StaticGroup* find_static_group(const std::string& n);
  bool has_name(const std::string& n) const;  // any cell or group

  // Adds the implicit go/done interface ports for the current staticness.
  void add_interface_ports();

  bool operator==(const Component&) const = default;
};

// Primitive width expressions are either a parameter name or a literal.
struct WidthExpr {
  std::string param;
  uint32_t literal = 0;
  bool operator==(const WidthExpr&) const = default;
};

enum class StateModel { kCombinational, kRegistered, kDynamic };

struct PrimitiveDecl {
  struct Port {
    std::string name;
    WidthExpr width;
    Direction dir = Direction::kInput;
    PortRole role = PortRole::kNone;
    bool operator==(const Port&) const = default;
  };
  std::string name;
  std::vector<std::string> params;
  std::vector<Port> ports;
  std::optional<Cycles> latency;       // static calling convention: go only
  std::optional<Cycles> done_latency;  // dynamic interface with fixed timing
  StateModel model = StateModel::kCombinational;
  bool shareable = false;

  const Port* find_port(const std::string& n) const;
  const Port* port_with_role(PortRole role) const;
  bool operator==(const PrimitiveDecl&) const = default;
};

struct Program {
  std::vector<PrimitiveDecl> externs;
  std::vector<Component> components;
  std::string entry;
  bool import_primitives = false;

  const Component* find_component(const std::string& n) const;
  Component* find_component(const std::string& n);
  const PrimitiveDecl* find_primitive(const std::string& n) const;
  const Component& entry_component() const;

  bool operator==(const Program&) const = default;
};

// Resolves the width of `port` on `cell` (primitive or component instance).
std::optional<uint32_t> cell_port_width(const Program& prog, const Cell& cell,
                                        const std::string& port);
std::optional<Direction> cell_port_dir(const Program& prog, const Cell& cell,
                                       const std::string& port);
// Port carrying `role` on the cell's prototype, e.g. the go port of std_reg
// is `write_en`.
std::optional<std::string> cell_role_port(const Program& prog,
                                          const Cell& cell, PortRole role);

// Latency of a static callee (primitive latency or static component).
std::optional<Cycles> callee_latency(const Program& prog, const Cell& cell);

// Visits every port reference read by an atom/guard.
void collect_reads(const GuardExpr& e, std::vector<PortRef>& out);
void collect_reads(const Assignment& a, std::vector<PortRef>& out);

// Applies `fn` to every control node in pre-order.
template <typename Fn>
void walk(const Control& c, Fn&& fn) {
  fn(c);
  for (const Control& child : c.children) walk(child, fn);
}
template <typename Fn>
void walk_mut(Control& c, Fn&& fn) {
  fn(c);
  for (Control& child : c.children) walk_mut(child, fn);
}

// Returns `base` if unused in `comp`, otherwise `base_1`, `base_2`, ...
std::string fresh_name(const Component& comp, const std::string& base);

uint32_t bits_for(uint64_t count);  // ceil(log2(count)), at least 1

}  // namespace uil

#endif  // UIL_IR_HPP_
