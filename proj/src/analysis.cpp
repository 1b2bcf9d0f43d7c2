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

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "uil/analysis.hpp"
#include "uil/primitives.hpp"

namespace uil {

std::string Diagnostic::str() const {
  const char* sev = severity == Severity::kError ? "error" : "warning";
  return span.str() + ": " + sev + ": " + message;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) {
    return d.severity == Diagnostic::Severity::kError;
  });
}

std::optional<Cycles> LatencyEnv::group_latency(const std::string& name) const {
  if (const StaticGroup* g = comp_.find_static_group(name)) return g->latency;
  return std::nullopt;
}

std::optional<Cycles> LatencyEnv::invoke_latency(
    const std::string& cell) const {
  const Cell* c = comp_.find_cell(cell);
  if (!c) return std::nullopt;
  return callee_latency(prog_, *c);
}

std::optional<Cycles> latency_of(const Control& node, const LatencyEnv& env) {
  using K = Control::Kind;
  switch (node.kind) {
    case K::kEmpty:
      return 0;
    case K::kStaticEnable:
      return env.group_latency(node.name);
    case K::kStaticInvoke:
      return env.invoke_latency(node.name);
    case K::kStaticSeq: {
      Cycles total = 0;
      for (const Control& c : node.children) {
        auto l = latency_of(c, env);
        if (!l) return std::nullopt;
        total += *l;
      }
      return total;
    }
    case K::kStaticPar:
    case K::kStaticIf: {
      Cycles most = 0;
      for (const Control& c : node.children) {
        auto l = latency_of(c, env);
        if (!l) return std::nullopt;
        most = std::max(most, *l);
      }
      return most;
    }
    case K::kStaticRepeat: {
      auto l = latency_of(node.children.at(0), env);
      if (!l) return std::nullopt;
      return node.count * *l;
    }
    default:
      return std::nullopt;
  }
}

StaticGroup normalize_guards(StaticGroup group) {
  for (Assignment& a : group.assignments) {
    if (!a.guard.timing) a.guard.timing = Interval{0, group.latency};
  }
  return group;
}

namespace {

struct PortInfo {
  uint32_t width = 0;
  bool readable = false;
  bool writable = false;
};

class Validator {
 public:
  Validator(const Program& prog, const ValidateOptions& opts)
      : prog_(prog), opts_(opts) {}

  std::vector<Diagnostic> run() {
    std::set<std::string> names;
    for (const Component& c : prog_.components) {
      if (!names.insert(c.name).second)
        error(c.span, "duplicate component '" + c.name + "'");
      if (find_builtin_primitive(c.name))
        error(c.span, "component '" + c.name + "' shadows a primitive");
    }
    if (!prog_.find_component(prog_.entry))
      error({}, "entry component '" + prog_.entry + "' is not defined");
    check_instantiation_cycles();
    for (const Component& c : prog_.components) check_component(c);
    return std::move(diags_);
  }

 private:
  void error(const SourceSpan& span, std::string msg) {
    diags_.push_back({Diagnostic::Severity::kError, std::move(msg), span});
  }

  void check_instantiation_cycles() {
    std::map<std::string, int> state;  // 0 new, 1 visiting, 2 done
    std::function<void(const Component&)> visit = [&](const Component& c) {
      state[c.name] = 1;
      for (const Cell& cell : c.cells) {
        const Component* sub = prog_.find_component(cell.prototype);
        if (!sub) continue;
        if (state[sub->name] == 1) {
          error(cell.span, "recursive instantiation of component '" +
                               sub->name + "'");
        } else if (state[sub->name] == 0) {
          visit(*sub);
        }
      }
      state[c.name] = 2;
    };
    for (const Component& c : prog_.components)
      if (state[c.name] == 0) visit(c);
  }

  void check_component(const Component& comp) {
    comp_ = &comp;
    std::set<std::string> names;
    for (const PortDef& p : comp.ports) {
      if (!names.insert(p.name).second)
        error(p.span, "duplicate port '" + p.name + "'");
      if (p.width == 0 || p.width > 64)
        error(p.span, "port '" + p.name + "' width must be in [1, 64]");
    }
    for (const Cell& cell : comp.cells) {
      if (!names.insert(cell.name).second)
        error(cell.span, "duplicate name '" + cell.name + "'");
      check_cell(cell);
    }
    for (const Group& g : comp.groups) {
      if (!names.insert(g.name).second)
        error(g.span, "duplicate name '" + g.name + "'");
      check_reserved(g.name, g.span);
    }
    for (const StaticGroup& g : comp.static_groups) {
      if (!names.insert(g.name).second)
        error(g.span, "duplicate name '" + g.name + "'");
      check_reserved(g.name, g.span);
    }
    for (const Group& g : comp.groups) check_group(g);
    for (const StaticGroup& g : comp.static_groups) check_static_group(g);
    for (const Assignment& a : comp.continuous) {
      if (a.guard.timing)
        error(a.span, "timing guard outside of a static group");
      check_assignment(a);
    }
    check_conflicts(comp.continuous, "continuous assignments");
    check_control(comp.control, false);
    if (comp.latency && comp.control.kind != Control::Kind::kEmpty) {
      LatencyEnv env(prog_, comp);
      auto l = latency_of(comp.control, env);
      if (!comp.control.is_static() || !l) {
        error(comp.span, "static component '" + comp.name +
                             "' must have static control");
      } else if (*l != *comp.latency) {
        error(comp.span, "static component '" + comp.name +
                             "' declares latency " +
                             std::to_string(*comp.latency) +
                             " but its control takes " + std::to_string(*l));
      }
    }
    check_comb_cycles(comp);
  }

  void check_reserved(const std::string& name, const SourceSpan& span) {
    if (!opts_.allow_reserved_names && name.rfind(kDelayPrefix, 0) == 0)
      error(span, "name '" + name + "' uses the reserved prefix __delay_");
  }

  void check_cell(const Cell& cell) {
    if (const PrimitiveDecl* prim = prog_.find_primitive(cell.prototype)) {
      if (cell.args.size() != prim->params.size()) {
        error(cell.span, "primitive '" + prim->name + "' expects " +
                             std::to_string(prim->params.size()) +
                             " arguments");
        return;
      }
      for (const PrimitiveDecl::Port& p : prim->ports) {
        auto w = cell_port_width(prog_, cell, p.name);
        if (!w || *w == 0 || *w > 64)
          error(cell.span, "cell '" + cell.name + "' port '" + p.name +
                               "' width must be in [1, 64]");
      }
      if (prim->name == "std_mem_d1" && cell.args.size() == 3) {
        if (cell.args[1] == 0)
          error(cell.span, "memory '" + cell.name + "' has size 0");
      }
      return;
    }
    if (prog_.find_component(cell.prototype)) {
      if (!cell.args.empty())
        error(cell.span, "component instance '" + cell.name +
                             "' takes no arguments");
      return;
    }
    error(cell.span, "unknown prototype '" + cell.prototype + "' for cell '" +
                         cell.name + "'");
  }

  std::optional<PortInfo> resolve(const PortRef& ref, const SourceSpan& span) {
    const Component& comp = *comp_;
    switch (ref.kind) {
      case PortRef::Kind::kThis: {
        const PortDef* p = comp.find_port(ref.port);
        if (!p) {
          error(span, "unknown port '" + ref.port + "'");
          return std::nullopt;
        }
        bool in = p->dir == Direction::kInput;
        return PortInfo{p->width, in, !in};
      }
      case PortRef::Kind::kCell: {
        const Cell* cell = comp.find_cell(ref.parent);
        if (!cell) {
          error(span, "unknown cell '" + ref.parent + "'");
          return std::nullopt;
        }
        auto dir = cell_port_dir(prog_, *cell, ref.port);
        auto w = cell_port_width(prog_, *cell, ref.port);
        if (!dir || !w) {
          if (prog_.find_primitive(cell->prototype) ||
              prog_.find_component(cell->prototype))
            error(span, "cell '" + ref.parent + "' has no port '" + ref.port +
                            "'");
          return std::nullopt;
        }
        bool in = *dir == Direction::kInput;
        return PortInfo{*w, !in, in};
      }
      case PortRef::Kind::kHole: {
        bool dyn = comp.find_group(ref.parent) != nullptr;
        bool stat = comp.find_static_group(ref.parent) != nullptr;
        if (!dyn && !stat) {
          error(span, "unknown group '" + ref.parent + "'");
          return std::nullopt;
        }
        if (ref.port != "go" && ref.port != "done") {
          error(span, "unknown group signal '" + ref.str() + "'");
          return std::nullopt;
        }
        if (stat && ref.port == "done") {
          error(span, "static group '" + ref.parent + "' has no done signal");
          return std::nullopt;
        }
        return PortInfo{1, true, true};
      }
    }
    return std::nullopt;
  }

  // Width of an atom; unsized constants return nullopt through `unsized`.
  std::optional<uint32_t> atom_width(const Atom& a, const SourceSpan& span,
                                     bool& ok) {
    if (const PortRef* p = as_port(a)) {
      auto info = resolve(*p, span);
      if (!info) {
        ok = false;
        return std::nullopt;
      }
      if (!info->readable) {
        error(span, "port '" + p->str() + "' cannot be read");
        ok = false;
      }
      return info->width;
    }
    const Constant& c = std::get<Constant>(a);
    if (c.width && (*c.width == 0 || *c.width > 64)) {
      error(span, "constant width must be in [1, 64]");
      ok = false;
    }
    return c.width;
  }

  static bool fits(uint64_t v, uint32_t width) {
    return width >= 64 || v < (uint64_t{1} << width);
  }

  void check_widths(const Atom& lhs, const Atom& rhs, const SourceSpan& span,
                    const std::string& what) {
    bool ok = true;
    auto wl = atom_width(lhs, span, ok);
    if (!ok) return;
    check_widths(lhs, wl, rhs, span, what);
  }

  // `lhs` has already been resolved to width `wl`.
  void check_widths(const Atom& lhs, std::optional<uint32_t> wl,
                    const Atom& rhs, const SourceSpan& span,
                    const std::string& what) {
    bool ok = true;
    auto wr = atom_width(rhs, span, ok);
    if (!ok) return;
    if (wl && wr) {
      if (*wl != *wr)
        error(span, "width mismatch in " + what + ": " + std::to_string(*wl) +
                        " vs " + std::to_string(*wr));
      return;
    }
    const Atom& unsized = wl ? rhs : lhs;
    auto w = wl ? wl : wr;
    if (!w) return;
    if (const Constant* c = std::get_if<Constant>(&unsized)) {
      if (!fits(c->value, *w))
        error(span, "constant " + std::to_string(c->value) +
                        " does not fit in " + std::to_string(*w) + " bits");
    }
  }

  void check_guard(const GuardExpr& e, const SourceSpan& span) {
    switch (e.kind) {
      case GuardExpr::Kind::kTrue:
        return;
      case GuardExpr::Kind::kPort: {
        auto info = resolve(e.port, span);
        if (!info) return;
        if (!info->readable)
          error(span, "port '" + e.port.str() + "' cannot be read");
        if (info->width != 1)
          error(span, "guard port '" + e.port.str() + "' must be 1 bit");
        return;
      }
      case GuardExpr::Kind::kCmp:
        check_widths(e.operands.at(0), e.operands.at(1), span, "comparison");
        return;
      default:
        for (const GuardExpr& c : e.children) check_guard(c, span);
    }
  }

  void check_assignment(const Assignment& a) {
    auto dst = resolve(a.dst, a.span);
    if (dst && !dst->writable)
      error(a.span, "port '" + a.dst.str() + "' cannot be assigned");
    if (dst) {
      bool ok = true;
      auto ws = atom_width(a.src, a.span, ok);
      if (ok) {
        if (ws && *ws != dst->width) {
          error(a.span, "width mismatch: '" + a.dst.str() + "' is " +
                            std::to_string(dst->width) + " bits, source is " +
                            std::to_string(*ws));
        } else if (!ws) {
          const Constant& c = std::get<Constant>(a.src);
          if (!fits(c.value, dst->width))
            error(a.span, "constant " + std::to_string(c.value) +
                              " does not fit in " +
                              std::to_string(dst->width) + " bits");
        }
      }
    } else {
      bool ok = true;
      atom_width(a.src, a.span, ok);
    }
    check_guard(a.guard.cond, a.span);
  }

  void check_group(const Group& g) {
    bool has_done = false;
    for (const Assignment& a : g.assignments) {
      if (a.guard.timing)
        error(a.span, "timing guard in dynamic group '" + g.name + "'");
      if (a.dst == PortRef::Done(g.name)) has_done = true;
      check_assignment(a);
    }
    if (!has_done)
      error(g.span, "group '" + g.name + "' has no done condition");
    check_conflicts(g.assignments, "group '" + g.name + "'");
  }

  void check_static_group(const StaticGroup& g) {
    if (g.latency == 0)
      error(g.span, "static group '" + g.name + "' must have latency >= 1");
    for (const Assignment& a : g.assignments) {
      if (a.dst.is_hole() && a.dst.port == "done")
        error(a.span, "static group '" + g.name +
                          "' assigns a done signal");
      if (a.guard.timing) {
        const Interval& iv = *a.guard.timing;
        if (iv.begin >= iv.end)
          error(a.span, "empty timing interval");
        else if (iv.end > g.latency)
          error(a.span, "timing interval exceeds latency of static group '" +
                            g.name + "'");
      }
      check_assignment(a);
    }
    check_conflicts(g.assignments, "static group '" + g.name + "'");
  }

  // Two unconditional drivers of one port that may be active in the same
  // cycle with different values.
  void check_conflicts(const std::vector<Assignment>& as,
                       const std::string& where) {
    for (size_t i = 0; i < as.size(); ++i) {
      for (size_t j = i + 1; j < as.size(); ++j) {
        const Assignment& a = as[i];
        const Assignment& b = as[j];
        if (!(a.dst == b.dst) || !a.guard.cond.is_true() ||
            !b.guard.cond.is_true() || a.src == b.src)
          continue;
        if (a.guard.timing && b.guard.timing) {
          const Interval& x = *a.guard.timing;
          const Interval& y = *b.guard.timing;
          if (x.end <= y.begin || y.end <= x.begin) continue;
        }
        error(b.span, "conflicting drivers for '" + a.dst.str() + "' in " +
                          where);
      }
    }
  }

  void check_cond(const PortRef& p, const SourceSpan& span) {
    auto info = resolve(p, span);
    if (!info) return;
    if (!info->readable) error(span, "port '" + p.str() + "' cannot be read");
    if (info->width != 1)
      error(span, "condition port '" + p.str() + "' must be 1 bit");
  }

  void check_invoke(const Control& c, bool in_static) {
    const Cell* cell = comp_->find_cell(c.name);
    if (!cell) {
      error(c.span, "invoke of unknown cell '" + c.name + "'");
      return;
    }
    auto go = cell_role_port(prog_, *cell, PortRole::kGo);
    auto done = cell_role_port(prog_, *cell, PortRole::kDone);
    auto lat = callee_latency(prog_, *cell);
    bool static_callee = lat.has_value();
    if (!go) {
      error(c.span, "cell '" + c.name + "' cannot be invoked (no go port)");
      return;
    }
    if (!static_callee && !done) {
      error(c.span, "cell '" + c.name + "' cannot be invoked (no done port)");
      return;
    }
    if ((in_static || c.kind == Control::Kind::kStaticInvoke) &&
        !static_callee) {
      error(c.span, "static parent, dynamic child: invoke of dynamic cell '" +
                        c.name + "'");
    }
    for (const Binding& b : c.bindings) {
      auto dir = cell_port_dir(prog_, *cell, b.port);
      if (!dir || *dir != Direction::kInput) {
        error(c.span, "invoke binding '" + b.port + "' is not an input of '" +
                          c.name + "'");
        continue;
      }
      if (b.port == *go) {
        error(c.span, "invoke may not bind the go port");
        continue;
      }
      check_widths(Atom{PortRef::Cell(c.name, b.port)},
                   cell_port_width(prog_, *cell, b.port), b.value, c.span,
                   "invoke binding");
    }
  }

  void check_control(const Control& c, bool in_static) {
    using K = Control::Kind;
    if (in_static && !c.is_static() && c.kind != K::kEmpty) {
      error(c.span, std::string("static parent, dynamic child: ") +
                        control_kind_str(c.kind) +
                        (c.name.empty() ? "" : " '" + c.name + "'") +
                        " inside static control");
      return;
    }
    switch (c.kind) {
      case K::kEmpty:
        break;
      case K::kEnable:
        if (comp_->find_static_group(c.name))
          error(c.span, "'" + c.name + "' is static; use a static enable");
        else if (!comp_->find_group(c.name))
          error(c.span, "unknown group '" + c.name + "'");
        break;
      case K::kStaticEnable:
        if (comp_->find_group(c.name))
          error(c.span, "static parent, dynamic child: group '" + c.name +
                            "' is dynamic");
        else if (!comp_->find_static_group(c.name))
          error(c.span, "unknown static group '" + c.name + "'");
        break;
      case K::kIf:
      case K::kStaticIf:
      case K::kWhile:
        check_cond(c.cond, c.span);
        break;
      case K::kInvoke:
      case K::kStaticInvoke:
        check_invoke(c, in_static);
        break;
      default:
        break;
    }
    size_t want = 0;
    switch (c.kind) {
      case K::kIf:
      case K::kStaticIf:
        want = 2;
        break;
      case K::kWhile:
      case K::kRepeat:
      case K::kStaticRepeat:
        want = 1;
        break;
      default:
        want = c.children.size();
    }
    if (c.children.size() != want) {
      error(c.span, std::string("malformed ") + control_kind_str(c.kind));
      return;
    }
    bool child_static = in_static || c.is_static();
    for (const Control& child : c.children) check_control(child, child_static);
    if (c.is_static() && c.latency) {
      LatencyEnv env(prog_, *comp_);
      auto l = latency_of(c, env);
      if (l && *l != *c.latency)
        error(c.span, std::string(control_kind_str(c.kind)) +
                          " declares latency " + std::to_string(*c.latency) +
                          " but takes " + std::to_string(*l));
    }
  }

  void check_comb_cycles(const Component& comp) {
    std::map<std::string, std::set<std::string>> edges;
    auto add_assign = [&](const Assignment& a) {
      std::vector<PortRef> reads;
      collect_reads(a, reads);
      for (const PortRef& r : reads) edges[r.str()].insert(a.dst.str());
    };
    for (const Assignment& a : comp.continuous) add_assign(a);
    for (const Group& g : comp.groups)
      for (const Assignment& a : g.assignments) add_assign(a);
    for (const StaticGroup& g : comp.static_groups)
      for (const Assignment& a : g.assignments) add_assign(a);
    for (const Cell& cell : comp.cells) {
      auto kind = primitive_kind(cell.prototype);
      if (!kind) continue;
      const PrimitiveDecl* prim = find_builtin_primitive(cell.prototype);
      if (is_combinational(*kind)) {
        for (const auto& i : prim->ports) {
          if (i.dir != Direction::kInput) continue;
          for (const auto& o : prim->ports)
            if (o.dir == Direction::kOutput)
              edges[cell.name + "." + i.name].insert(cell.name + "." + o.name);
        }
      } else if (*kind == PrimKind::kMemD1) {
        edges[cell.name + ".addr0"].insert(cell.name + ".read_data");
      }
    }
    std::map<std::string, int> state;
    std::vector<std::string> stack;
    bool reported = false;
    std::function<void(const std::string&)> dfs = [&](const std::string& n) {
      state[n] = 1;
      stack.push_back(n);
      auto it = edges.find(n);
      if (it != edges.end()) {
        for (const std::string& m : it->second) {
          if (reported) break;
          if (state[m] == 1) {
            auto from = std::find(stack.begin(), stack.end(), m);
            std::string path;
            for (auto p = from; p != stack.end(); ++p) path += *p + " -> ";
            path += m;
            error(comp.span, "combinational cycle in component '" +
                                 comp.name + "': " + path);
            reported = true;
          } else if (state[m] == 0) {
            dfs(m);
          }
        }
      }
      stack.pop_back();
      state[n] = 2;
    };
    for (const auto& [n, _] : edges)
      if (!reported && state[n] == 0) dfs(n);
  }

  const Program& prog_;
  ValidateOptions opts_;
  const Component* comp_ = nullptr;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> validate(const Program& prog,
                                 const ValidateOptions& opts) {
  return Validator(prog, opts).run();
}

}  // namespace uil
