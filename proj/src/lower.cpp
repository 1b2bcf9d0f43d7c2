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

#include "uil/lower.hpp"

#include <set>
#include <stdexcept>

#include "uil/analysis.hpp"

namespace uil {
namespace {

struct Piece {
  std::string group;  // empty when the subtree takes no cycles
  Cycles latency = 0;
};

class Collapser {
 public:
  Collapser(const Program& prog, Component& comp) : prog_(prog), comp_(comp) {}

  void run() {
    if (comp_.is_static()) {
      comp_.control = to_control(collapse(comp_.control));
    } else {
      comp_.control = rewrite(std::move(comp_.control));
    }
    remove_unused_static_groups(comp_);
  }

 private:
  static Control to_control(const Piece& p) {
    return p.latency == 0 ? Control::Empty() : Control::StaticEnable(p.group);
  }

  bool static_invoke(const Control& c) const {
    if (c.kind != Control::Kind::kInvoke) return false;
    const Cell* cell = comp_.find_cell(c.name);
    return cell && callee_latency(prog_, *cell).has_value();
  }

  Control rewrite(Control c) {
    using K = Control::Kind;
    if (c.is_static() || static_invoke(c)) {
      if (c.kind == K::kInvoke) c.kind = K::kStaticInvoke;
      return to_control(collapse(c));
    }
    for (Control& k : c.children) k = rewrite(std::move(k));
    if (c.kind == K::kSeq || c.kind == K::kPar) {
      std::erase_if(c.children,
                    [](const Control& k) { return k.kind == K::kEmpty; });
    }
    return c;
  }

  StaticGroup& static_group(const std::string& name) {
    StaticGroup* g = comp_.find_static_group(name);
    if (!g) throw std::logic_error("collapse: missing static group " + name);
    return *g;
  }

  std::string add_group(const std::string& base, Cycles latency,
                        std::vector<Assignment> as) {
    std::string name = fresh_name(comp_, base);
    comp_.static_groups.push_back({name, latency, std::move(as), {}, {}});
    return name;
  }

  std::vector<Assignment> normalized(const std::string& group) {
    return normalize_guards(static_group(group)).assignments;
  }

  std::vector<Piece> pieces(const Control& c) {
    std::vector<Piece> out;
    for (const Control& k : c.children) {
      Piece p = collapse(k);
      if (p.latency > 0) out.push_back(p);
    }
    return out;
  }

  Piece collapse(const Control& c) {
    using K = Control::Kind;
    switch (c.kind) {
      case K::kEmpty:
        return {};
      case K::kStaticEnable:
        return {c.name, static_group(c.name).latency};
      case K::kStaticSeq: {
        std::vector<Piece> ps = pieces(c);
        if (ps.empty()) return {};
        if (ps.size() == 1) return ps[0];
        std::vector<Assignment> as;
        Cycles offset = 0;
        for (const Piece& p : ps) {
          for (Assignment a : normalized(p.group)) {
            a.guard.timing->begin += offset;
            a.guard.timing->end += offset;
            as.push_back(std::move(a));
          }
          offset += p.latency;
        }
        return {add_group("comp_seq", offset, std::move(as)), offset};
      }
      case K::kStaticPar: {
        std::vector<Piece> ps = pieces(c);
        if (ps.empty()) return {};
        if (ps.size() == 1) return ps[0];
        std::vector<Assignment> as;
        Cycles latency = 0;
        for (const Piece& p : ps) {
          for (Assignment& a : normalized(p.group)) as.push_back(std::move(a));
          latency = std::max(latency, p.latency);
        }
        return {add_group("comp_par", latency, std::move(as)), latency};
      }
      case K::kStaticIf:
        return collapse_if(c);
      case K::kStaticRepeat: {
        Piece body = collapse(c.children.at(0));
        if (body.latency == 0 || c.count == 0) return {};
        if (c.count == 1) return body;
        Cycles latency = c.count * body.latency;
        std::vector<Assignment> as;
        as.push_back({PortRef::Go(body.group), Constant{1, 1},
                      Guard{Interval{0, latency}, GuardExpr::True()},
                      c.span});
        return {add_group("comp_repeat", latency, std::move(as)), latency};
      }
      case K::kStaticInvoke:
      case K::kInvoke: {
        const Cell* cell = comp_.find_cell(c.name);
        Cycles latency = cell ? callee_latency(prog_, *cell).value_or(0) : 0;
        if (latency == 0) return {};
        Guard full{Interval{0, latency}, GuardExpr::True()};
        std::vector<Assignment> as;
        std::string go = *cell_role_port(prog_, *cell, PortRole::kGo);
        as.push_back({PortRef::Cell(c.name, go), Constant{1, 1}, full, c.span});
        for (const Binding& b : c.bindings)
          as.push_back({PortRef::Cell(c.name, b.port), b.value, full, c.span});
        return {add_group("comp_invoke", latency, std::move(as)), latency};
      }
      default:
        throw std::logic_error(std::string("collapse: dynamic node ") +
                               control_kind_str(c.kind) +
                               " inside static control");
    }
  }

  Piece collapse_if(const Control& c) {
    Piece t = collapse(c.children.at(0));
    Piece f = collapse(c.children.at(1));
    Cycles latency = std::max(t.latency, f.latency);
    if (latency == 0) return {};
    std::vector<Assignment> as;
    GuardExpr now = GuardExpr::Port(c.cond);
    GuardExpr later;
    if (latency > 1) {
      std::string stash = fresh_name(comp_, "cond_stash");
      comp_.cells.push_back({stash, "std_reg", {1}, {}, c.span});
      Guard first{Interval{0, 1}, GuardExpr::True()};
      as.push_back({PortRef::Cell(stash, "in"), c.cond, first, c.span});
      as.push_back(
          {PortRef::Cell(stash, "write_en"), Constant{1, 1}, first, c.span});
      later = GuardExpr::Port(PortRef::Cell(stash, "out"));
    }
    auto branch = [&](const Piece& p, bool positive) {
      if (p.latency == 0) return;
      for (const Assignment& a : normalized(p.group)) {
        const Interval iv = *a.guard.timing;
        if (iv.begin == 0) {
          Assignment head = a;
          head.guard.timing = Interval{0, 1};
          head.guard.cond = conjoin(
              positive ? now : GuardExpr::Not(now), a.guard.cond);
          as.push_back(std::move(head));
        }
        if (iv.end > 1) {
          Assignment tail = a;
          tail.guard.timing = Interval{std::max<Cycles>(iv.begin, 1), iv.end};
          tail.guard.cond = conjoin(
              positive ? later : GuardExpr::Not(later), a.guard.cond);
          as.push_back(std::move(tail));
        }
      }
    };
    branch(t, true);
    branch(f, false);
    return {add_group("comp_if", latency, std::move(as)), latency};
  }

  const Program& prog_;
  Component& comp_;
};

void collect_holes(const std::vector<Assignment>& as,
                   std::set<std::string>& out) {
  for (const Assignment& a : as) {
    std::vector<PortRef> refs;
    collect_reads(a, refs);
    refs.push_back(a.dst);
    for (const PortRef& r : refs)
      if (r.is_hole()) out.insert(r.parent);
  }
}

GuardExpr interval_guard(const PortRef& fsm, uint32_t width, Interval iv,
                         Cycles latency) {
  Atom f = fsm;
  auto k = [&](Cycles v) { return Atom{Constant{v, width}}; };
  if (iv.end == iv.begin + 1) return GuardExpr::Cmp(CmpOp::kEq, f, k(iv.begin));
  GuardExpr g;
  if (iv.begin > 0) g = GuardExpr::Cmp(CmpOp::kGe, f, k(iv.begin));
  if (iv.end < latency)
    g = conjoin(std::move(g), GuardExpr::Cmp(CmpOp::kLt, f, k(iv.end)));
  return g;
}

}  // namespace

void remove_unused_static_groups(Component& comp) {
  for (;;) {
    std::set<std::string> used;
    walk(comp.control, [&](const Control& c) {
      if (c.kind == Control::Kind::kStaticEnable) used.insert(c.name);
    });
    collect_holes(comp.continuous, used);
    for (const Group& g : comp.groups) collect_holes(g.assignments, used);
    for (const StaticGroup& g : comp.static_groups)
      collect_holes(g.assignments, used);
    size_t before = comp.static_groups.size();
    std::erase_if(comp.static_groups, [&](const StaticGroup& g) {
      return !used.count(g.name);
    });
    if (comp.static_groups.size() == before) return;
  }
}

void collapse_static_control(const Program& prog, Component& comp) {
  Collapser(prog, comp).run();
}

void instantiate_fsms(const Program&, Component& comp) {
  std::vector<Cell> new_cells;
  for (StaticGroup& g : comp.static_groups) {
    if (g.latency < 2) {
      for (Assignment& a : g.assignments) a.guard.timing.reset();
      continue;
    }
    uint32_t w = bits_for(g.latency);
    std::string fsm = fresh_name(comp, g.name + "_fsm");
    comp.cells.push_back({fsm, "std_reg", {w}, {}, g.span});
    std::string incr = fresh_name(comp, g.name + "_incr");
    comp.cells.push_back({incr, "std_add", {w}, {}, g.span});
    PortRef out = PortRef::Cell(fsm, "out");
    for (Assignment& a : g.assignments) {
      if (!a.guard.timing) continue;
      a.guard.cond = conjoin(interval_guard(out, w, *a.guard.timing, g.latency),
                             std::move(a.guard.cond));
      a.guard.timing.reset();
    }
    Atom last = Constant{g.latency - 1, w};
    g.assignments.push_back({PortRef::Cell(incr, "left"), out, {}, g.span});
    g.assignments.push_back(
        {PortRef::Cell(incr, "right"), Constant{1, w}, {}, g.span});
    g.assignments.push_back({PortRef::Cell(fsm, "in"), Constant{0, w},
                             Guard{std::nullopt,
                                   GuardExpr::Cmp(CmpOp::kEq, out, last)},
                             g.span});
    g.assignments.push_back({PortRef::Cell(fsm, "in"),
                             PortRef::Cell(incr, "out"),
                             Guard{std::nullopt,
                                   GuardExpr::Cmp(CmpOp::kNeq, out, last)},
                             g.span});
    g.assignments.push_back(
        {PortRef::Cell(fsm, "write_en"), Constant{1, 1}, {}, g.span});
  }
}

std::optional<std::string> find_fsm(const Component& comp,
                                    const std::string& group) {
  const StaticGroup* g = comp.find_static_group(group);
  if (!g) return std::nullopt;
  std::string prefix = group + "_fsm";
  for (const Assignment& a : g->assignments) {
    if (a.dst.kind == PortRef::Kind::kCell && a.dst.port == "write_en" &&
        a.dst.parent.rfind(prefix, 0) == 0)
      return a.dst.parent;
  }
  return std::nullopt;
}

namespace {

class WrapperInserter {
 public:
  WrapperInserter(Component& comp, const LowerOptions& opts)
      : comp_(comp), opts_(opts) {}

  void run() {
    if (comp_.is_static()) {
      if (comp_.control.kind == Control::Kind::kStaticEnable) {
        comp_.continuous.push_back({PortRef::Go(comp_.control.name),
                                    PortRef::This("go"), {}, {}});
      }
      comp_.control = Control::Empty();
      return;
    }
    comp_.control = rewrite(std::move(comp_.control));
  }

 private:
  GuardExpr at_start(const std::string& g) {
    auto fsm = find_fsm(comp_, g);
    if (!fsm) return GuardExpr::True();
    uint32_t w = bits_for(comp_.find_static_group(g)->latency);
    return GuardExpr::Cmp(CmpOp::kEq, PortRef::Cell(*fsm, "out"),
                          Constant{0, w});
  }

  Control rewrite(Control c) {
    using K = Control::Kind;
    if (c.kind == K::kStaticEnable) return Control::Enable(wrap(c.name));
    if (c.kind == K::kWhile && opts_.while_fastpath &&
        c.children[0].kind == K::kStaticEnable) {
      const std::string& g = c.children[0].name;
      std::string w = fresh_name(comp_, g + "_while");
      Group grp{w, {}, {{kWrapperAttr, 1}}, c.span};
      grp.assignments.push_back(
          {PortRef::Go(g), Constant{1, 1}, {}, c.span});
      GuardExpr stop = conjoin(at_start(g), GuardExpr::Not(GuardExpr::Port(c.cond)));
      grp.assignments.push_back({PortRef::Done(w), Constant{1, 1},
                                 Guard{std::nullopt, std::move(stop)},
                                 c.span});
      comp_.groups.push_back(std::move(grp));
      Control e = Control::Enable(w);
      e.attrs = c.attrs;
      return e;
    }
    for (Control& k : c.children) k = rewrite(std::move(k));
    return c;
  }

  std::string wrap(const std::string& g) {
    auto it = wrappers_.find(g);
    if (it != wrappers_.end()) return it->second;
    std::string w = fresh_name(comp_, g + "_wrap");
    std::string sig = fresh_name(comp_, g + "_sig");
    comp_.cells.push_back({sig, "std_reg", {1}, {}, {}});
    Group grp{w, {}, {{kWrapperAttr, 1}}, {}};
    Atom one = Constant{1, 1};
    grp.assignments.push_back({PortRef::Go(g), one, {}, {}});
    grp.assignments.push_back({PortRef::Cell(sig, "in"), one, {}, {}});
    grp.assignments.push_back({PortRef::Cell(sig, "write_en"), one, {}, {}});
    GuardExpr done =
        conjoin(at_start(g), GuardExpr::Port(PortRef::Cell(sig, "out")));
    grp.assignments.push_back(
        {PortRef::Done(w), one, Guard{std::nullopt, std::move(done)}, {}});
    comp_.groups.push_back(std::move(grp));
    Guard when_done{std::nullopt, GuardExpr::Port(PortRef::Done(w))};
    comp_.continuous.push_back(
        {PortRef::Cell(sig, "in"), Constant{0, 1}, when_done, {}});
    comp_.continuous.push_back(
        {PortRef::Cell(sig, "write_en"), one, when_done, {}});
    wrappers_[g] = w;
    return w;
  }

  Component& comp_;
  const LowerOptions& opts_;
  std::map<std::string, std::string> wrappers_;
};

}  // namespace

void insert_wrappers(const Program&, Component& comp,
                     const LowerOptions& opts) {
  WrapperInserter(comp, opts).run();
}

Program lower(Program prog, const LowerOptions& opts) {
  const Program lookup = prog;
  for (Component& c : prog.components) collapse_static_control(lookup, c);
  for (Component& c : prog.components) instantiate_fsms(lookup, c);
  for (Component& c : prog.components) insert_wrappers(lookup, c, opts);
  return prog;
}

}  // namespace uil
