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

#include <limits>
#include <set>

#include "uil/opt.hpp"
#include "uil/primitives.hpp"

namespace uil {
namespace {

constexpr Cycles kForever = std::numeric_limits<Cycles>::max();

struct Frame {
  enum class Kind { kPar, kLoop, kIf } kind;
  bool conditional = false;  // may run zero times
  int lo = 0, hi = 0;        // program point range
};

using Path = std::vector<std::pair<int, int>>;  // (frame, branch)

struct Occurrence {
  std::string group;
  int pos = 0;
  Cycles begin = 0, end = kForever;  // window inside a static island
  bool island = false;
  Path path;
};

// Part of a live range: program points [lo, hi], optionally narrowed to a
// cycle window when it covers a single static island.
struct Use {
  int lo, hi;
  bool windowed;
  Cycles begin, end;
};

bool overlap(const Use& a, const Use& b) {
  if (a.hi < b.lo || b.hi < a.lo) return false;
  if (a.windowed && b.windowed && a.lo == a.hi && b.lo == b.hi)
    return a.begin < b.end && b.begin < a.end;
  return true;
}

bool overlap(const std::vector<Use>& a, const std::vector<Use>& b) {
  for (const Use& x : a)
    for (const Use& y : b)
      if (overlap(x, y)) return true;
  return false;
}

void rename_port(PortRef& p, const std::string& from, const std::string& to) {
  if (p.kind == PortRef::Kind::kCell && p.parent == from) p.parent = to;
}

void rename_atom(Atom& a, const std::string& from, const std::string& to) {
  if (auto* p = std::get_if<PortRef>(&a)) rename_port(*p, from, to);
}

void rename_guard(GuardExpr& g, const std::string& from,
                  const std::string& to) {
  rename_port(g.port, from, to);
  for (Atom& a : g.operands) rename_atom(a, from, to);
  for (GuardExpr& k : g.children) rename_guard(k, from, to);
}

void rename_assignments(std::vector<Assignment>& as, const std::string& from,
                        const std::string& to) {
  for (Assignment& a : as) {
    rename_port(a.dst, from, to);
    rename_atom(a.src, from, to);
    rename_guard(a.guard.cond, from, to);
  }
}

void rename_cell(Component& comp, const std::string& from,
                 const std::string& to) {
  rename_assignments(comp.continuous, from, to);
  for (Group& g : comp.groups) rename_assignments(g.assignments, from, to);
  for (StaticGroup& g : comp.static_groups)
    rename_assignments(g.assignments, from, to);
  walk_mut(comp.control, [&](Control& c) {
    rename_port(c.cond, from, to);
    for (Binding& b : c.bindings) rename_atom(b.value, from, to);
  });
}

std::set<std::string> cells_in(const std::vector<Assignment>& as) {
  std::set<std::string> out;
  for (const Assignment& a : as) {
    std::vector<PortRef> rs;
    collect_reads(a, rs);
    rs.push_back(a.dst);
    for (const PortRef& r : rs)
      if (r.kind == PortRef::Kind::kCell) out.insert(r.parent);
  }
  return out;
}

class Sharer {
 public:
  Sharer(const Program& prog, Component& comp) : prog_(prog), comp_(comp) {}

  void run() {
    collect_exclusions();
    dynamic(comp_.control, {});
    std::map<std::string, std::vector<std::string>> reps;  // type -> reps
    std::map<std::string, std::vector<Use>> live;
    std::map<std::string, std::string> merged;
    for (const Cell& cell : comp_.cells) {
      auto uses = live_range(cell);
      if (!uses) continue;
      std::string type = cell.prototype + "(";
      for (uint64_t a : cell.args) type += std::to_string(a) + ",";
      auto& list = reps[type];
      bool done = false;
      for (const std::string& rep : list) {
        if (overlap(live[rep], *uses)) continue;
        live[rep].insert(live[rep].end(), uses->begin(), uses->end());
        merged[cell.name] = rep;
        done = true;
        break;
      }
      if (!done) {
        list.push_back(cell.name);
        live[cell.name] = std::move(*uses);
      }
    }
    for (const auto& [from, to] : merged) rename_cell(comp_, from, to);
    std::erase_if(comp_.cells,
                  [&](const Cell& c) { return merged.count(c.name) > 0; });
  }

 private:
  void collect_exclusions() {
    for (const std::string& c : cells_in(comp_.continuous)) excluded_.insert(c);
    std::set<std::string> hole_driven;
    auto holes = [&](const std::vector<Assignment>& as) {
      for (const Assignment& a : as)
        if (a.dst.is_hole() && a.dst.port == "go")
          hole_driven.insert(a.dst.parent);
    };
    holes(comp_.continuous);
    for (const Group& g : comp_.groups) holes(g.assignments);
    for (const StaticGroup& g : comp_.static_groups) holes(g.assignments);
    for (const Group& g : comp_.groups)
      if (hole_driven.count(g.name))
        for (const std::string& c : cells_in(g.assignments)) excluded_.insert(c);
    for (const StaticGroup& g : comp_.static_groups)
      if (hole_driven.count(g.name))
        for (const std::string& c : cells_in(g.assignments)) excluded_.insert(c);
    walk(comp_.control, [&](const Control& c) {
      if (c.cond.kind == PortRef::Kind::kCell) excluded_.insert(c.cond.parent);
      if (c.kind == Control::Kind::kInvoke ||
          c.kind == Control::Kind::kStaticInvoke) {
        excluded_.insert(c.name);
        for (const Binding& b : c.bindings)
          if (const PortRef* p = as_port(b.value))
            if (p->kind == PortRef::Kind::kCell) excluded_.insert(p->parent);
      }
    });
  }

  int frame(Frame::Kind kind, bool conditional) {
    frames_.push_back({kind, conditional, next_pos_, next_pos_});
    return static_cast<int>(frames_.size() - 1);
  }

  void close(int f) { frames_[f].hi = next_pos_ - 1; }

  void dynamic(const Control& c, const Path& path) {
    using K = Control::Kind;
    bool static_invoke = false;
    if (c.kind == K::kInvoke) {
      const Cell* cell = comp_.find_cell(c.name);
      static_invoke = cell && callee_latency(prog_, *cell).has_value();
    }
    if (c.is_static() || static_invoke) {
      island(c, next_pos_++, 0, std::nullopt, path);
      return;
    }
    switch (c.kind) {
      case K::kEnable:
        occ_.push_back({c.name, next_pos_++, 0, kForever, false, path});
        return;
      case K::kInvoke:
        ++next_pos_;
        return;
      case K::kSeq:
        for (const Control& k : c.children) dynamic(k, path);
        return;
      case K::kPar:
      case K::kIf: {
        int f = frame(c.kind == K::kPar ? Frame::Kind::kPar : Frame::Kind::kIf,
                      c.kind == K::kIf);
        for (size_t i = 0; i < c.children.size(); ++i) {
          Path p = path;
          p.push_back({f, static_cast<int>(i)});
          dynamic(c.children[i], p);
        }
        close(f);
        return;
      }
      case K::kWhile:
      case K::kRepeat: {
        int f = frame(Frame::Kind::kLoop,
                      c.kind == K::kWhile || c.count == 0);
        Path p = path;
        p.push_back({f, 0});
        dynamic(c.children[0], p);
        close(f);
        return;
      }
      default:
        return;
    }
  }

  void island(const Control& c, int pos, Cycles off,
              std::optional<std::pair<Cycles, Cycles>> clamp,
              const Path& path) {
    using K = Control::Kind;
    LatencyEnv env(prog_, comp_);
    switch (c.kind) {
      case K::kStaticEnable: {
        Cycles n = latency_of(c, env).value_or(0);
        Occurrence o{c.name, pos, off, off + n, true, path};
        if (clamp) std::tie(o.begin, o.end) = *clamp;
        occ_.push_back(std::move(o));
        return;
      }
      case K::kStaticSeq:
        for (const Control& k : c.children) {
          island(k, pos, off, clamp, path);
          off += latency_of(k, env).value_or(0);
        }
        return;
      case K::kStaticPar:
        for (const Control& k : c.children) island(k, pos, off, clamp, path);
        return;
      case K::kStaticIf: {
        int f = frame(Frame::Kind::kIf, true);
        for (size_t i = 0; i < 2; ++i) {
          Path p = path;
          p.push_back({f, static_cast<int>(i)});
          island(c.children[i], pos, off, clamp, p);
        }
        frames_[f].lo = frames_[f].hi = pos;
        return;
      }
      case K::kStaticRepeat: {
        Cycles span = latency_of(c, env).value_or(0);
        int f = frame(Frame::Kind::kLoop, c.count == 0);
        frames_[f].lo = frames_[f].hi = pos;
        Path p = path;
        p.push_back({f, 0});
        auto inner = clamp ? clamp : std::make_pair(off, off + span);
        island(c.children[0], pos, off, inner, p);
        return;
      }
      default:
        return;
    }
  }

  const StaticGroup* static_group(const std::string& g) const {
    return comp_.find_static_group(g);
  }

  const std::vector<Assignment>& assignments(const std::string& g) const {
    if (const Group* d = comp_.find_group(g)) return d->assignments;
    return comp_.find_static_group(g)->assignments;
  }

  // Outermost dynamic par enclosing an occurrence, if any.
  std::optional<int> outer_par(const Occurrence& o) const {
    for (const auto& [f, b] : o.path)
      if (frames_[f].kind == Frame::Kind::kPar) return f;
    return std::nullopt;
  }

  bool reads_outputs(const std::vector<Assignment>& as, const Cell& cell,
                     const PrimitiveDecl& prim, Cycles earliest) const {
    for (const Assignment& a : as) {
      std::vector<PortRef> rs;
      collect_reads(a, rs);
      for (const PortRef& r : rs) {
        if (r.kind != PortRef::Kind::kCell || r.parent != cell.name) continue;
        const PrimitiveDecl::Port* p = prim.find_port(r.port);
        if (!p || p->dir != Direction::kOutput || p->role == PortRole::kDone)
          continue;
        if (a.guard.timing && a.guard.timing->begin >= earliest) continue;
        return true;
      }
    }
    return false;
  }

  // The first use must overwrite the cell before anything reads it, so the
  // value left by an earlier occupant can never be observed.
  bool writes_first(const Occurrence& o, const Cell& cell,
                    const PrimitiveDecl& prim) const {
    const PrimitiveDecl::Port* go = prim.port_with_role(PortRole::kGo);
    const PrimitiveDecl::Port* done = prim.port_with_role(PortRole::kDone);
    if (!go) return false;
    Cycles latency = prim.latency ? *prim.latency
                     : prim.done_latency ? *prim.done_latency
                                         : kForever;
    if (latency == kForever) return false;
    const auto& as = assignments(o.group);
    bool wrote = false;
    for (const Assignment& a : as) {
      if (a.dst != PortRef::Cell(cell.name, go->name)) continue;
      const Constant* k = std::get_if<Constant>(&a.src);
      if (!k || k->value != 1) continue;
      if (a.guard.timing && a.guard.timing->begin != 0) continue;
      const GuardExpr& g = a.guard.cond;
      bool plain = g.is_true() ||
                   (done && g.kind == GuardExpr::Kind::kNot &&
                    g.children[0].kind == GuardExpr::Kind::kPort &&
                    g.children[0].port == PortRef::Cell(cell.name, done->name));
      if (plain) wrote = true;
    }
    if (!wrote) return false;
    bool is_static = static_group(o.group) != nullptr;
    return !reads_outputs(as, cell, prim, is_static ? latency : kForever);
  }

  std::optional<std::vector<Use>> live_range(const Cell& cell) {
    if (excluded_.count(cell.name)) return std::nullopt;
    if (prog_.find_component(cell.prototype)) return std::nullopt;
    const PrimitiveDecl* prim = prog_.find_primitive(cell.prototype);
    if (!prim || !prim->shareable) return std::nullopt;
    std::vector<const Occurrence*> occs;
    for (const Occurrence& o : occ_)
      if (cells_in(assignments(o.group)).count(cell.name)) occs.push_back(&o);
    std::vector<Use> uses;
    auto kind = primitive_kind(cell.prototype);
    if (kind && is_combinational(*kind)) {
      for (const Occurrence* o : occs) {
        if (auto par = outer_par(*o)) {
          uses.push_back({frames_[*par].lo, frames_[*par].hi, false, 0, 0});
        } else {
          uses.push_back({o->pos, o->pos, o->island, o->begin, o->end});
        }
      }
      return uses;
    }
    if (occs.empty()) return uses;
    std::sort(occs.begin(), occs.end(),
              [](const Occurrence* a, const Occurrence* b) {
                return std::tie(a->pos, a->begin) < std::tie(b->pos, b->begin);
              });
    const Occurrence& first = *occs.front();
    Cycles latency = prim->latency       ? *prim->latency
                     : prim->done_latency ? *prim->done_latency
                                          : 0;
    for (const Occurrence* o : occs) {
      if (o->pos == first.pos && o->begin == first.begin) {
        if (!writes_first(*o, cell, *prim)) return std::nullopt;
      } else if (o->pos == first.pos && o->island &&
                 o->begin < first.begin + latency &&
                 reads_outputs(assignments(o->group), cell, *prim, kForever)) {
        return std::nullopt;
      }
    }
    for (const auto& [f, branch] : first.path) {
      const Frame& fr = frames_[f];
      if (!(fr.kind == Frame::Kind::kIf || fr.conditional)) continue;
      for (const Occurrence* o : occs) {
        if (std::find(o->path.begin(), o->path.end(),
                      std::make_pair(f, branch)) == o->path.end())
          return std::nullopt;
      }
    }
    Use hull{first.pos, first.pos, true, first.begin, first.end};
    for (const Occurrence* o : occs) {
      hull.lo = std::min(hull.lo, o->pos);
      hull.hi = std::max(hull.hi, o->pos);
      hull.windowed = hull.windowed && o->island;
      hull.begin = std::min(hull.begin, o->begin);
      hull.end = std::max(hull.end, o->end);
      for (const auto& [f, branch] : o->path) {
        const Frame& fr = frames_[f];
        if (fr.kind == Frame::Kind::kIf) continue;
        if (fr.lo == fr.hi && fr.lo == o->pos) continue;  // inside an island
        hull.lo = std::min(hull.lo, fr.lo);
        hull.hi = std::max(hull.hi, fr.hi);
        hull.windowed = false;
      }
    }
    if (hull.lo != hull.hi) hull.windowed = false;
    uses.push_back(hull);
    return uses;
  }

  const Program& prog_;
  Component& comp_;
  std::set<std::string> excluded_;
  std::vector<Frame> frames_;
  std::vector<Occurrence> occ_;
  int next_pos_ = 0;
};

}  // namespace

void share_cells(const Program& prog, Component& comp) {
  Sharer(prog, comp).run();
}

}  // namespace uil
