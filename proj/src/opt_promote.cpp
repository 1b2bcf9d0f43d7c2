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

#include <set>

#include "uil/opt.hpp"
#include "uil/primitives.hpp"

namespace uil {
namespace {

bool is_not_done(const GuardExpr& g, const std::string& cell,
                 const std::string& done) {
  return g.kind == GuardExpr::Kind::kNot &&
         g.children[0].kind == GuardExpr::Kind::kPort &&
         g.children[0].port == PortRef::Cell(cell, done);
}

class GroupTiming {
 public:
  GroupTiming(const Program& prog, const Component& comp, const Group& g)
      : prog_(prog), comp_(comp), g_(g) {}

  std::optional<Cycles> done_time(const std::string& cell, int depth = 0) {
    if (depth > static_cast<int>(comp_.cells.size())) return std::nullopt;
    const Cell* c = comp_.find_cell(cell);
    if (!c) return std::nullopt;
    const PrimitiveDecl* prim = prog_.find_primitive(c->prototype);
    if (!prim || !prim->done_latency) return std::nullopt;
    auto start = start_time(*c, *prim, depth);
    if (!start) return std::nullopt;
    return *start + *prim->done_latency;
  }

 private:
  std::optional<Cycles> start_time(const Cell& c, const PrimitiveDecl& prim,
                                   int depth) {
    const PrimitiveDecl::Port* go = prim.port_with_role(PortRole::kGo);
    const PrimitiveDecl::Port* done = prim.port_with_role(PortRole::kDone);
    if (!go || !done) return std::nullopt;
    const Assignment* drive = nullptr;
    for (const Assignment& a : g_.assignments) {
      if (a.dst != PortRef::Cell(c.name, go->name)) continue;
      if (drive) return std::nullopt;
      drive = &a;
    }
    if (!drive) return std::nullopt;
    const GuardExpr& guard = drive->guard.cond;
    if (const Constant* k = std::get_if<Constant>(&drive->src)) {
      if (k->value != 1) return std::nullopt;
      if (is_not_done(guard, c.name, done->name)) return 0;
      // A busy unit ignores go, so holding go through the done cycle would
      // restart it.
      if (guard.is_true() && prim.model != StateModel::kDynamic) return 0;
      return std::nullopt;
    }
    const PortRef& src = std::get<PortRef>(drive->src);
    if (!guard.is_true() || src.kind != PortRef::Kind::kCell)
      return std::nullopt;
    const Cell* d = comp_.find_cell(src.parent);
    if (!d) return std::nullopt;
    auto role = cell_role_port(prog_, *d, PortRole::kDone);
    if (!role || *role != src.port) return std::nullopt;
    return done_time(d->name, depth + 1);
  }

  const Program& prog_;
  const Component& comp_;
  const Group& g_;
};

std::optional<Cycles> hint(const Component& comp, const Control& c) {
  if (c.kind == Control::Kind::kEnable) {
    const Group* g = comp.find_group(c.name);
    if (!g) return std::nullopt;
    auto it = g->attrs.find(kStaticHint);
    if (it == g->attrs.end()) return std::nullopt;
    return it->second;
  }
  auto it = c.attrs.find(kStaticHint);
  if (it == c.attrs.end()) return std::nullopt;
  return it->second;
}

std::optional<Cycles> static_latency(const Program& prog,
                                     const Component& comp,
                                     const Control& c) {
  if (c.is_static()) return latency_of(c, LatencyEnv(prog, comp));
  if (c.kind == Control::Kind::kInvoke) {
    const Cell* cell = comp.find_cell(c.name);
    if (cell) return callee_latency(prog, *cell);
  }
  return std::nullopt;
}

// Dynamic cycle model shared by prediction (max over branches) and the
// promotion profitability check (min over branches).
std::optional<Cycles> dynamic_cycles(const Program& prog,
                                     const Component& comp,
                                     const Control& c, bool minimum) {
  using K = Control::Kind;
  if (c.kind == K::kEmpty) return 0;
  if (auto l = static_latency(prog, comp, c)) return *l == 0 ? 0 : *l + 1;
  switch (c.kind) {
    case K::kEnable: {
      auto n = hint(comp, c);
      if (!n) return std::nullopt;
      return *n + 1;
    }
    case K::kSeq:
    case K::kPar: {
      Cycles acc = 0;
      for (const Control& k : c.children) {
        auto n = dynamic_cycles(prog, comp, k, minimum);
        if (!n) return std::nullopt;
        acc = c.kind == K::kSeq ? acc + *n : std::max(acc, *n);
      }
      return acc;
    }
    case K::kIf: {
      auto t = dynamic_cycles(prog, comp, c.children[0], minimum);
      auto f = dynamic_cycles(prog, comp, c.children[1], minimum);
      if (!t || !f) return std::nullopt;
      return 1 + (minimum ? std::min(*t, *f) : std::max(*t, *f));
    }
    case K::kRepeat: {
      auto b = dynamic_cycles(prog, comp, c.children[0], minimum);
      if (!b) return std::nullopt;
      return c.count * *b;
    }
    default:
      return std::nullopt;
  }
}

class Annotator {
 public:
  Annotator(const Program& prog, Component& comp,
            std::vector<Diagnostic>& diags)
      : prog_(prog), comp_(comp), diags_(diags) {}

  void run() {
    for (Group& g : comp_.groups) {
      auto n = infer_group_latency(prog_, comp_, g);
      set_hint(g.attrs, n, "group '" + g.name + "'", g.span);
    }
    annotate(comp_.control);
  }

 private:
  void set_hint(Attributes& attrs, std::optional<Cycles> n,
                const std::string& what, const SourceSpan& span) {
    auto it = attrs.find(kStaticHint);
    if (it != attrs.end() && (!n || *n != it->second)) {
      std::string got = n ? "its latency is " + std::to_string(*n)
                          : "its latency cannot be inferred";
      diags_.push_back({Diagnostic::Severity::kWarning,
                        what + " is annotated @static(" +
                            std::to_string(it->second) + ") but " + got,
                        span});
    }
    if (n) {
      attrs[kStaticHint] = *n;
    } else {
      attrs.erase(kStaticHint);
    }
  }

  std::optional<Cycles> annotate(Control& c) {
    using K = Control::Kind;
    std::vector<std::optional<Cycles>> kids;
    for (Control& k : c.children) kids.push_back(annotate(k));
    if (c.kind == K::kEmpty) return 0;
    if (auto l = static_latency(prog_, comp_, c)) return l;
    std::optional<Cycles> n;
    bool all = std::all_of(kids.begin(), kids.end(),
                           [](const auto& k) { return k.has_value(); });
    switch (c.kind) {
      case K::kEnable:
        return hint(comp_, c);
      case K::kSeq:
        if (all) {
          n = 0;
          for (const auto& k : kids) *n += *k;
        }
        break;
      case K::kPar:
      case K::kIf:
        if (all) {
          n = 0;
          for (const auto& k : kids) n = std::max(*n, *k);
        }
        break;
      case K::kRepeat:
        if (all) n = c.count * *kids[0];
        break;
      default:
        break;
    }
    set_hint(c.attrs, n, std::string(control_kind_str(c.kind)), c.span);
    return n;
  }

  const Program& prog_;
  Component& comp_;
  std::vector<Diagnostic>& diags_;
};

class Promoter {
 public:
  Promoter(const Program& prog, Component& comp, const PromotionConfig& cfg)
      : prog_(prog), comp_(comp), cfg_(cfg) {}

  void run() {
    walk(comp_.control, [&](const Control& c) {
      if (c.kind == Control::Kind::kEnable) ++enables_[c.name];
    });
    comp_.control = visit(std::move(comp_.control));
    convert_groups();
  }

 private:
  uint64_t size(const Control& c) const {
    uint64_t n = 0;
    walk(c, [&](const Control& k) {
      switch (k.kind) {
        case Control::Kind::kEnable:
        case Control::Kind::kStaticEnable:
        case Control::Kind::kInvoke:
        case Control::Kind::kStaticInvoke:
          ++n;
          break;
        case Control::Kind::kIf:
        case Control::Kind::kStaticIf:
        case Control::Kind::kWhile:
          ++n;
          break;
        default:
          break;
      }
    });
    return n;
  }

  Control visit(Control c) {
    if (c.is_static() || c.kind == Control::Kind::kEmpty) return c;
    auto n = hint(comp_, c);
    if (c.kind == Control::Kind::kInvoke) n = static_latency(prog_, comp_, c);
    if (n && *n >= 1 && *n <= cfg_.max_cycles && size(c) >= cfg_.threshold) {
      auto dyn = dynamic_cycles(prog_, comp_, c, true);
      if (dyn && *n + 1 <= *dyn) return convert(std::move(c));
    }
    if (c.kind == Control::Kind::kSeq) {
      c.children = promote_runs(std::move(c.children));
      return c;
    }
    for (Control& k : c.children) k = visit(std::move(k));
    return c;
  }

  std::optional<Cycles> child_latency(const Control& c) const {
    if (c.is_static() || c.kind == Control::Kind::kInvoke)
      return static_latency(prog_, comp_, c);
    if (c.kind == Control::Kind::kEmpty) return 0;
    return hint(comp_, c);
  }

  // Inside a seq that stays dynamic, maximal runs of statically timed
  // children become one island, paying a single handshake cycle.
  std::vector<Control> promote_runs(std::vector<Control> kids) {
    std::vector<Control> out;
    size_t i = 0;
    while (i < kids.size()) {
      size_t j = i;
      Cycles total = 0;
      for (; j < kids.size(); ++j) {
        auto l = child_latency(kids[j]);
        if (!l) break;
        total += *l;
      }
      if (j - i < 2) {
        out.push_back(visit(std::move(kids[i])));
        ++i;
        continue;
      }
      std::vector<Control> run(std::make_move_iterator(kids.begin() + i),
                               std::make_move_iterator(kids.begin() + j));
      Control seq = Control::Seq(std::move(run));
      auto dyn = dynamic_cycles(prog_, comp_, seq, true);
      if (total >= 1 && total <= cfg_.max_cycles &&
          size(seq) >= cfg_.threshold && dyn && total + 1 <= *dyn) {
        out.push_back(convert(std::move(seq)));
      } else {
        for (Control& k : seq.children) out.push_back(visit(std::move(k)));
      }
      i = j;
    }
    return out;
  }

  Control convert(Control c) {
    using K = Control::Kind;
    for (Control& k : c.children) k = convert(std::move(k));
    c.attrs.erase(kStaticHint);
    switch (c.kind) {
      case K::kEnable:
        ++promoted_[c.name];
        c.kind = K::kStaticEnable;
        break;
      case K::kSeq:
        c.kind = K::kStaticSeq;
        c.attrs[kPromotedAttr] = 1;
        break;
      case K::kPar:
        c.kind = K::kStaticPar;
        break;
      case K::kIf:
        c.kind = K::kStaticIf;
        break;
      case K::kRepeat:
        c.kind = K::kStaticRepeat;
        break;
      case K::kInvoke:
        c.kind = K::kStaticInvoke;
        break;
      default:
        break;
    }
    return c;
  }

  bool hole_referenced(const std::string& g) const {
    auto refs = [&](const std::vector<Assignment>& as, const std::string& own) {
      for (const Assignment& a : as) {
        std::vector<PortRef> rs;
        collect_reads(a, rs);
        rs.push_back(a.dst);
        for (const PortRef& r : rs) {
          if (!r.is_hole() || r.parent != g) continue;
          if (own == g && a.dst == PortRef::Done(g)) continue;
          return true;
        }
      }
      return false;
    };
    if (refs(comp_.continuous, "")) return true;
    for (const Group& o : comp_.groups)
      if (refs(o.assignments, o.name)) return true;
    for (const StaticGroup& o : comp_.static_groups)
      if (refs(o.assignments, "")) return true;
    return false;
  }

  void convert_groups() {
    std::map<std::string, std::string> renamed;
    for (const auto& [name, count] : promoted_) {
      const Group* g = comp_.find_group(name);
      StaticGroup sg;
      sg.latency = g->attrs.at(kStaticHint);
      sg.span = g->span;
      sg.attrs = g->attrs;
      sg.attrs.erase(kStaticHint);
      for (const Assignment& a : g->assignments) {
        if (a.dst == PortRef::Done(name)) continue;
        sg.assignments.push_back(a);
      }
      bool in_place = count == enables_[name] && !hole_referenced(name);
      if (in_place) {
        sg.name = name;
        std::erase_if(comp_.groups,
                      [&](const Group& x) { return x.name == name; });
      } else {
        sg.name = fresh_name(comp_, name + "_static");
        renamed[name] = sg.name;
      }
      comp_.static_groups.push_back(std::move(sg));
    }
    walk_mut(comp_.control, [&](Control& c) {
      if (c.kind != Control::Kind::kStaticEnable) return;
      auto it = renamed.find(c.name);
      if (it != renamed.end()) c.name = it->second;
    });
  }

  const Program& prog_;
  Component& comp_;
  const PromotionConfig& cfg_;
  std::map<std::string, uint64_t> enables_;
  std::map<std::string, uint64_t> promoted_;
};

}  // namespace

std::optional<Cycles> infer_group_latency(const Program& prog,
                                          const Component& comp,
                                          const Group& group) {
  const Assignment* done = nullptr;
  for (const Assignment& a : group.assignments) {
    std::vector<PortRef> reads;
    collect_reads(a, reads);
    for (const PortRef& r : reads)
      if (r.is_hole() && r.parent == group.name) return std::nullopt;
    if (a.dst.is_hole() && a.dst.parent == group.name) {
      if (done || a.dst.port != "done") return std::nullopt;
      done = &a;
    }
  }
  if (!done || !done->guard.is_true()) return std::nullopt;
  const PortRef* src = as_port(done->src);
  if (!src || src->kind != PortRef::Kind::kCell) return std::nullopt;
  const Cell* cell = comp.find_cell(src->parent);
  if (!cell) return std::nullopt;
  auto role = cell_role_port(prog, *cell, PortRole::kDone);
  if (!role || *role != src->port) return std::nullopt;
  auto n = GroupTiming(prog, comp, group).done_time(cell->name);
  if (!n || *n == 0) return std::nullopt;
  return n;
}

std::vector<Diagnostic> infer_static_timing(const Program& prog,
                                            Component& comp) {
  std::vector<Diagnostic> diags;
  Annotator(prog, comp, diags).run();
  return diags;
}

std::optional<Cycles> predicted_dynamic_cycles(const Program& prog,
                                               const Component& comp,
                                               const Control& node) {
  return dynamic_cycles(prog, comp, node, false);
}

void promote(const Program& prog, Component& comp,
             const PromotionConfig& config) {
  Promoter(prog, comp, config).run();
}

}  // namespace uil
