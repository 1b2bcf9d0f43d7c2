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

constexpr const char* kThisCell = "";  // pseudo-cell for component ports

struct Access {
  std::set<std::string> reads;
  std::set<std::string> writes;
  bool ok = true;
};

class AccessCollector {
 public:
  AccessCollector(const Program& prog, const Component& comp)
      : prog_(prog), comp_(comp) {}

  Access collect(const Control& c) {
    Access acc;
    visit(c, acc);
    return acc;
  }

 private:
  void read_port(const PortRef& p, Access& acc, int depth = 0) {
    switch (p.kind) {
      case PortRef::Kind::kHole:
        acc.ok = false;
        return;
      case PortRef::Kind::kThis: {
        const PortDef* def = comp_.find_port(p.port);
        if (def && def->dir == Direction::kOutput) acc.reads.insert(kThisCell);
        return;
      }
      case PortRef::Kind::kCell:
        read_cell(p.parent, acc, depth);
        return;
    }
  }

  // Reading a combinational output also reads whatever continuous
  // assignments feed its inputs.
  void read_cell(const std::string& cell, Access& acc, int depth) {
    if (!acc.reads.insert(cell).second || depth > 64) return;
    const Cell* c = comp_.find_cell(cell);
    if (!c) return;
    auto kind = primitive_kind(c->prototype);
    bool comb_out = kind && (is_combinational(*kind) || *kind == PrimKind::kMemD1);
    if (!comb_out) return;
    for (const Assignment& a : comp_.continuous) {
      if (a.dst.kind != PortRef::Kind::kCell || a.dst.parent != cell) continue;
      std::vector<PortRef> rs;
      collect_reads(a, rs);
      for (const PortRef& r : rs) read_port(r, acc, depth + 1);
    }
  }

  void assignments(const std::vector<Assignment>& as, Access& acc) {
    for (const Assignment& a : as) {
      std::vector<PortRef> rs;
      collect_reads(a, rs);
      for (const PortRef& r : rs) read_port(r, acc);
      switch (a.dst.kind) {
        case PortRef::Kind::kHole:
          acc.ok = false;
          break;
        case PortRef::Kind::kThis:
          acc.writes.insert(kThisCell);
          break;
        case PortRef::Kind::kCell:
          acc.writes.insert(a.dst.parent);
          break;
      }
    }
  }

  void visit(const Control& c, Access& acc) {
    using K = Control::Kind;
    switch (c.kind) {
      case K::kStaticEnable: {
        const StaticGroup* g = comp_.find_static_group(c.name);
        if (!g) {
          acc.ok = false;
          return;
        }
        assignments(g->assignments, acc);
        break;
      }
      case K::kStaticIf:
        read_port(c.cond, acc);
        break;
      case K::kStaticInvoke:
      case K::kInvoke:
        acc.writes.insert(c.name);
        acc.reads.insert(c.name);
        for (const Binding& b : c.bindings)
          if (const PortRef* p = as_port(b.value)) read_port(*p, acc);
        break;
      case K::kEmpty:
      case K::kStaticSeq:
      case K::kStaticPar:
      case K::kStaticRepeat:
        break;
      default:
        acc.ok = false;
        return;
    }
    for (const Control& k : c.children) visit(k, acc);
  }

  const Program& prog_;
  const Component& comp_;
};

bool intersects(const std::set<std::string>& a, const std::set<std::string>& b) {
  for (const std::string& x : a)
    if (b.count(x)) return true;
  return false;
}

bool compactable(const Control& c) {
  if (c.kind == Control::Kind::kStaticSeq)
    return c.attrs.count(kPromotedAttr) > 0;
  if (c.kind != Control::Kind::kSeq || c.children.size() < 2) return false;
  return std::all_of(c.children.begin(), c.children.end(), [](const Control& k) {
    return k.is_static() || k.kind == Control::Kind::kEmpty;
  });
}

class Compactor {
 public:
  Compactor(const Program& prog, Component& comp) : prog_(prog), comp_(comp) {}

  void run() { visit(comp_.control, {}); }

 private:
  // `concurrent` holds cells used by threads running alongside `c` in the
  // same static par. Shared cells there rely on their exact cycle windows.
  void visit(Control& c, const std::set<std::string>& concurrent) {
    if (c.kind == Control::Kind::kStaticPar) {
      AccessCollector collector(prog_, comp_);
      std::vector<std::set<std::string>> used;
      for (const Control& k : c.children) {
        Access a = collector.collect(k);
        a.reads.insert(a.writes.begin(), a.writes.end());
        used.push_back(std::move(a.reads));
      }
      for (size_t i = 0; i < c.children.size(); ++i) {
        std::set<std::string> others = concurrent;
        for (size_t j = 0; j < used.size(); ++j)
          if (j != i) others.insert(used[j].begin(), used[j].end());
        visit(c.children[i], others);
      }
    } else {
      for (Control& k : c.children) visit(k, concurrent);
    }
    if (!compactable(c)) return;
    std::vector<Control> kids;
    for (Control& k : c.children)
      if (k.kind != Control::Kind::kEmpty) kids.push_back(k);
    if (kids.size() < 2) return;
    Control seq = Control::StaticSeq(kids);
    auto edges = seq_dependencies(prog_, comp_, seq);
    if (!edges) return;
    if (!concurrent.empty()) {
      AccessCollector collector(prog_, comp_);
      Access a = collector.collect(seq);
      for (const std::string& cell : concurrent)
        if (a.reads.count(cell) || a.writes.count(cell)) return;
    }
    LatencyEnv env(prog_, comp_);
    std::vector<Cycles> lat;
    Cycles sum = 0;
    for (const Control& k : kids) {
      auto l = latency_of(k, env);
      if (!l) return;
      lat.push_back(*l);
      sum += *l;
    }
    Schedule s = asap_schedule(lat, *edges);
    if (s.makespan >= sum) return;
    std::vector<Control> threads;
    for (size_t i = 0; i < kids.size(); ++i) {
      if (lat[i] == 0) continue;
      if (s.start[i] == 0) {
        threads.push_back(std::move(kids[i]));
      } else {
        threads.push_back(Control::StaticSeq(
            {Control::StaticEnable(delay(s.start[i])), std::move(kids[i])}));
      }
    }
    Control par = Control::StaticPar(std::move(threads));
    par.span = c.span;
    c = std::move(par);
  }

  std::string delay(Cycles d) {
    std::string name = kDelayPrefix + std::to_string(d);
    const StaticGroup* g = comp_.find_static_group(name);
    if (g && g->latency == d && g->assignments.empty()) return name;
    if (comp_.has_name(name)) name = fresh_name(comp_, name);
    comp_.static_groups.push_back({name, d, {}, {}, {}});
    return name;
  }

  const Program& prog_;
  Component& comp_;
};

}  // namespace

Schedule asap_schedule(const std::vector<Cycles>& latency,
                       const std::vector<std::pair<size_t, size_t>>& edges) {
  Schedule s;
  s.start.assign(latency.size(), 0);
  std::vector<std::vector<size_t>> preds(latency.size());
  for (const auto& [u, v] : edges) preds[v].push_back(u);
  for (size_t v = 0; v < latency.size(); ++v) {
    for (size_t u : preds[v])
      s.start[v] = std::max(s.start[v], s.start[u] + latency[u]);
    s.makespan = std::max(s.makespan, s.start[v] + latency[v]);
  }
  return s;
}

std::optional<std::vector<std::pair<size_t, size_t>>> seq_dependencies(
    const Program& prog, const Component& comp, const Control& seq) {
  AccessCollector collector(prog, comp);
  std::vector<Access> acc;
  for (const Control& k : seq.children) {
    acc.push_back(collector.collect(k));
    if (!acc.back().ok) return std::nullopt;
  }
  std::vector<std::pair<size_t, size_t>> edges;
  for (size_t j = 0; j < acc.size(); ++j) {
    for (size_t i = 0; i < j; ++i) {
      if (intersects(acc[i].writes, acc[j].reads) ||
          intersects(acc[i].writes, acc[j].writes) ||
          intersects(acc[i].reads, acc[j].writes))
        edges.push_back({i, j});
    }
  }
  return edges;
}

void compact_schedule(const Program& prog, Component& comp) {
  Compactor(prog, comp).run();
}

}  // namespace uil
