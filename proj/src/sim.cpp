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
#include <memory>
#include <set>

#include "uil/analysis.hpp"
#include "uil/primitives.hpp"
#include "uil/sim.hpp"

namespace uil {
namespace {

using PortId = int32_t;
constexpr PortId kNoPort = -1;

uint64_t mask(uint64_t v, uint32_t width) {
  return width >= 64 ? v : v & ((uint64_t{1} << width) - 1);
}

struct Lit {
  PortId port;
  bool value;
};
using Pred = std::vector<Lit>;
using Tag = std::vector<std::pair<int, int>>;  // (par id, thread index)

bool tags_conflict(const Tag& a, const Tag& b) {
  for (const auto& [pa, ia] : a)
    for (const auto& [pb, ib] : b)
      if (pa == pb && ia != ib) return true;
  return false;
}

struct CtlDriver {
  PortId hole;
  Pred pred;
  Tag tag;
  int group;
};

struct CAtom {
  bool is_const = true;
  uint64_t value = 0;
  PortId port = kNoPort;
};

struct CGuard {
  GuardExpr::Kind kind = GuardExpr::Kind::kTrue;
  PortId port = kNoPort;
  CmpOp op = CmpOp::kEq;
  CAtom lhs, rhs;
  std::vector<CGuard> kids;
};

struct CAssign {
  PortId dst = kNoPort;
  CAtom src;
  CGuard guard;
  PortId gate = kNoPort;  // group go, when gated
  int counter = -1;       // static group counter for timing
  Cycles begin = 0, end = 0;
  int group = -1;
};

enum class PortKind { kDriven, kState, kInput, kCellOut };

struct PortInfo {
  std::string name;
  uint32_t width = 1;
  PortKind kind = PortKind::kDriven;
  int cell = -1;  // owning cell (primitive or component instance)
  bool go_role = false;
  std::vector<int> assigns;
};

struct GroupInfo {
  std::string name;  // qualified
  PortId go = kNoPort;
  PortId done = kNoPort;
  int counter = -1;
  std::vector<int> assigns;
};

struct CellInfo {
  std::string name;  // qualified
  bool stateful = false;
  int prim = -1;  // index into prims_, -1 for component instances
};

struct PrimInst {
  PrimKind kind;
  uint32_t width = 32;
  int cell = -1;
  std::string name;
  std::map<std::string, PortId> ports;
  // State.
  uint64_t value = 0;
  bool done = false;
  std::vector<uint64_t> mem;
  Cycles k = 0;
  Cycles latency = 0;
  uint64_t la = 0, lb = 0;
  enum class Phase { kIdle, kBusy, kDonePulse } phase = Phase::kIdle;

  PortId port(const char* n) const { return ports.at(n); }
};

class Sim;

class Exec {
 public:
  virtual ~Exec() = default;
  // Prepares a fresh run; false when the node takes zero cycles.
  virtual bool start() = 0;
  virtual void emit(const Pred& pred, const Tag& tag,
                    std::vector<CtlDriver>& out) const = 0;
  // Advances past the current cycle; true when this was the last one.
  virtual bool commit() = 0;
};

Pred with(const Pred& p, PortId port, bool value) {
  Pred out = p;
  out.push_back({port, value});
  return out;
}

class Sim {
 public:
  Sim(const Program& prog, const SimOptions& opts) : prog_(prog), opts_(opts) {}

  Trace run(const MemoryMap& init);

  uint64_t val(PortId p) const { return vals_[p]; }
  int next_par_id() { return par_ids_++; }

 private:
  struct Instance {
    std::string prefix;
    Component comp;
    bool is_static = false;
    std::map<std::string, PortId> this_ports;
    std::map<std::string, std::map<std::string, PortId>> cell_ports;
    std::map<std::string, int> groups;
    std::map<std::string, int> prims;
    std::unique_ptr<Exec> root;
    enum class State { kIdle, kRunning, kDonePulse } state = State::kIdle;
    bool root_live = false;
    bool finished = false;
  };

  friend class EnableExec;

  PortId add_port(std::string name, uint32_t width, PortKind kind,
                  int cell = -1) {
    ports_.push_back({std::move(name), width, kind, cell, false, {}});
    vals_.push_back(0);
    return static_cast<PortId>(ports_.size() - 1);
  }

  int make_instance(const Component& comp, const std::string& prefix,
                    std::map<std::string, PortId> this_ports);
  void elaborate_invokes(Component& comp);
  void compile_assign(Instance& inst, const Assignment& a, int group,
                      PortId gate, int counter);
  PortId resolve(const Instance& inst, const PortRef& ref) const;
  CAtom compile_atom(const Instance& inst, const Atom& a) const;
  CGuard compile_guard(const Instance& inst, const GuardExpr& e) const;
  std::unique_ptr<Exec> build(Instance& inst, const Control& c,
                              bool in_static);
  void compute_order();

  uint64_t atom_val(const CAtom& a) const {
    return a.is_const ? a.value : vals_[a.port];
  }
  bool guard_true(const CGuard& g) const;
  bool assign_active(const CAssign& a) const;
  bool pred_true(const Pred& p) const {
    for (const Lit& l : p)
      if ((vals_[l.port] != 0) != l.value) return false;
    return true;
  }
  uint64_t compute(PortId p) const;
  uint64_t cell_output(const PrimInst& prim, PortId p) const;

  void begin_cycle();
  void settle();
  void check_races();
  void check_conflicts();
  void commit_cycle(TraceCycle* rec);
  void commit_prim(PrimInst& prim, TraceCycle* rec);
  void emit_instance(Instance& inst, std::vector<CtlDriver>& out);
  void commit_instance(Instance& inst);

  [[noreturn]] void fail(SimErrorKind kind, const std::string& detail) const {
    throw SimError(kind, cycle_, detail);
  }

  const Program& prog_;
  SimOptions opts_;
  std::vector<PortInfo> ports_;
  std::vector<uint64_t> vals_;
  std::vector<CAssign> assigns_;
  std::vector<GroupInfo> groups_;
  std::vector<CellInfo> cells_;
  std::vector<PrimInst> prims_;
  std::vector<std::pair<uint64_t, Cycles>> counters_;  // (value, latency)
  std::vector<std::unique_ptr<Instance>> instances_;
  std::vector<CtlDriver> ctl_;
  std::vector<std::vector<int>> ctl_by_port_;
  std::vector<PortId> order_;
  std::vector<PortId> multi_driven_;
  Cycles cycle_ = 0;
  int par_ids_ = 0;
  int invoke_ids_ = 0;
};

// Executors ----------------------------------------------------------------

class EmptyExec : public Exec {
 public:
  bool start() override { return false; }
  void emit(const Pred&, const Tag&, std::vector<CtlDriver>&) const override {}
  bool commit() override { return true; }
};

class EnableExec : public Exec {
 public:
  EnableExec(const Sim& sim, PortId go, PortId done, int group)
      : sim_(sim), go_(go), done_(done), group_(group) {}
  bool start() override { return true; }
  void emit(const Pred& pred, const Tag& tag,
            std::vector<CtlDriver>& out) const override {
    out.push_back({go_, with(pred, done_, false), tag, group_});
  }
  bool commit() override { return sim_.val(done_) != 0; }

 private:
  const Sim& sim_;
  PortId go_, done_;
  int group_;
};

class StaticEnableExec : public Exec {
 public:
  StaticEnableExec(PortId go, Cycles latency, int group)
      : go_(go), latency_(latency), group_(group) {}
  bool start() override {
    k_ = 0;
    return latency_ > 0;
  }
  void emit(const Pred& pred, const Tag& tag,
            std::vector<CtlDriver>& out) const override {
    out.push_back({go_, pred, tag, group_});
  }
  bool commit() override { return ++k_ == latency_; }

 private:
  PortId go_;
  Cycles latency_;
  int group_;
  Cycles k_ = 0;
};

class SeqExec : public Exec {
 public:
  explicit SeqExec(std::vector<std::unique_ptr<Exec>> kids)
      : kids_(std::move(kids)) {}
  bool start() override {
    i_ = 0;
    return advance();
  }
  void emit(const Pred& pred, const Tag& tag,
            std::vector<CtlDriver>& out) const override {
    kids_[i_]->emit(pred, tag, out);
  }
  bool commit() override {
    if (!kids_[i_]->commit()) return false;
    ++i_;
    return !advance();
  }

 private:
  bool advance() {
    while (i_ < kids_.size() && !kids_[i_]->start()) ++i_;
    return i_ < kids_.size();
  }
  std::vector<std::unique_ptr<Exec>> kids_;
  size_t i_ = 0;
};

class ParExec : public Exec {
 public:
  ParExec(std::vector<std::unique_ptr<Exec>> kids, int par_id)
      : kids_(std::move(kids)), running_(kids_.size()), par_id_(par_id) {}
  bool start() override {
    bool any = false;
    for (size_t i = 0; i < kids_.size(); ++i) {
      running_[i] = kids_[i]->start();
      any |= static_cast<bool>(running_[i]);
    }
    return any;
  }
  void emit(const Pred& pred, const Tag& tag,
            std::vector<CtlDriver>& out) const override {
    for (size_t i = 0; i < kids_.size(); ++i) {
      if (!running_[i]) continue;
      if (par_id_ < 0) {
        kids_[i]->emit(pred, tag, out);
      } else {
        Tag t = tag;
        t.push_back({par_id_, static_cast<int>(i)});
        kids_[i]->emit(pred, t, out);
      }
    }
  }
  bool commit() override {
    bool any = false;
    for (size_t i = 0; i < kids_.size(); ++i) {
      if (running_[i] && kids_[i]->commit()) running_[i] = false;
      any |= static_cast<bool>(running_[i]);
    }
    return !any;
  }

 private:
  std::vector<std::unique_ptr<Exec>> kids_;
  std::vector<char> running_;
  int par_id_;  // -1 for static par
};

class IfExec : public Exec {
 public:
  IfExec(const Sim& sim, PortId cond, std::unique_ptr<Exec> t,
         std::unique_ptr<Exec> f)
      : sim_(sim), cond_(cond) {
    br_[0] = std::move(t);
    br_[1] = std::move(f);
  }
  bool start() override {
    checking_ = true;
    return true;
  }
  void emit(const Pred& pred, const Tag& tag,
            std::vector<CtlDriver>& out) const override {
    if (!checking_) br_[taken_]->emit(pred, tag, out);
  }
  bool commit() override {
    if (checking_) {
      taken_ = sim_.val(cond_) ? 0 : 1;
      checking_ = false;
      return !br_[taken_]->start();
    }
    return br_[taken_]->commit();
  }

 private:
  const Sim& sim_;
  PortId cond_;
  std::unique_ptr<Exec> br_[2];
  bool checking_ = true;
  int taken_ = 0;
};

class StaticIfExec : public Exec {
 public:
  StaticIfExec(const Sim& sim, PortId cond, Cycles latency,
               std::unique_ptr<Exec> t, std::unique_ptr<Exec> f)
      : sim_(sim), cond_(cond), latency_(latency) {
    br_[0] = std::move(t);
    br_[1] = std::move(f);
  }
  bool start() override {
    k_ = 0;
    if (latency_ == 0) return false;
    live_[0] = br_[0]->start();
    live_[1] = br_[1]->start();
    return true;
  }
  void emit(const Pred& pred, const Tag& tag,
            std::vector<CtlDriver>& out) const override {
    if (k_ == 0) {
      if (live_[0]) br_[0]->emit(with(pred, cond_, true), tag, out);
      if (live_[1]) br_[1]->emit(with(pred, cond_, false), tag, out);
    } else if (live_[taken_]) {
      br_[taken_]->emit(pred, tag, out);
    }
  }
  bool commit() override {
    if (k_ == 0) taken_ = sim_.val(cond_) ? 0 : 1;
    if (live_[taken_] && br_[taken_]->commit()) live_[taken_] = false;
    return ++k_ == latency_;
  }

 private:
  const Sim& sim_;
  PortId cond_;
  Cycles latency_;
  std::unique_ptr<Exec> br_[2];
  bool live_[2] = {false, false};
  int taken_ = 0;
  Cycles k_ = 0;
};

class WhileExec : public Exec {
 public:
  WhileExec(const Sim& sim, PortId cond, std::unique_ptr<Exec> body)
      : sim_(sim), cond_(cond), body_(std::move(body)) {}
  bool start() override {
    checking_ = true;
    return true;
  }
  void emit(const Pred& pred, const Tag& tag,
            std::vector<CtlDriver>& out) const override {
    if (!checking_) body_->emit(pred, tag, out);
  }
  bool commit() override {
    if (checking_) {
      if (!sim_.val(cond_)) return true;
      if (body_->start()) checking_ = false;
      return false;
    }
    if (body_->commit()) checking_ = true;
    return false;
  }

 private:
  const Sim& sim_;
  PortId cond_;
  std::unique_ptr<Exec> body_;
  bool checking_ = true;
};

// A while loop whose body is a static island: the body's first cycle
// doubles as the condition check.
class StaticBodyWhileExec : public Exec {
 public:
  StaticBodyWhileExec(const Sim& sim, PortId cond, std::unique_ptr<Exec> body)
      : sim_(sim), cond_(cond), body_(std::move(body)) {}
  bool start() override {
    boundary_ = true;
    live_ = body_->start();
    return true;
  }
  void emit(const Pred& pred, const Tag& tag,
            std::vector<CtlDriver>& out) const override {
    if (!live_) return;
    body_->emit(boundary_ ? with(pred, cond_, true) : pred, tag, out);
  }
  bool commit() override {
    if (boundary_ && !sim_.val(cond_)) return true;
    if (!live_) return false;
    if (body_->commit()) {
      boundary_ = true;
      live_ = body_->start();
    } else {
      boundary_ = false;
    }
    return false;
  }

 private:
  const Sim& sim_;
  PortId cond_;
  std::unique_ptr<Exec> body_;
  bool boundary_ = true;
  bool live_ = false;
};

class RepeatExec : public Exec {
 public:
  RepeatExec(uint64_t count, std::unique_ptr<Exec> body)
      : count_(count), body_(std::move(body)) {}
  bool start() override {
    iter_ = 0;
    return count_ > 0 && body_->start();
  }
  void emit(const Pred& pred, const Tag& tag,
            std::vector<CtlDriver>& out) const override {
    body_->emit(pred, tag, out);
  }
  bool commit() override {
    if (!body_->commit()) return false;
    if (++iter_ == count_) return true;
    body_->start();
    return false;
  }

 private:
  uint64_t count_;
  std::unique_ptr<Exec> body_;
  uint64_t iter_ = 0;
};

// A static subtree under dynamic control: its cycles plus one handshake
// cycle in which the wrapper observes completion.
class IslandExec : public Exec {
 public:
  explicit IslandExec(std::unique_ptr<Exec> body) : body_(std::move(body)) {}
  bool start() override {
    handshake_ = false;
    return body_->start();
  }
  void emit(const Pred& pred, const Tag& tag,
            std::vector<CtlDriver>& out) const override {
    if (!handshake_) body_->emit(pred, tag, out);
  }
  bool commit() override {
    if (handshake_) return true;
    if (body_->commit()) handshake_ = true;
    return false;
  }

 private:
  std::unique_ptr<Exec> body_;
  bool handshake_ = false;
};

// Construction ---------------------------------------------------------------

void Sim::elaborate_invokes(Component& comp) {
  walk_mut(comp.control, [&](Control& c) {
    if (c.kind != Control::Kind::kInvoke &&
        c.kind != Control::Kind::kStaticInvoke)
      return;
    const Cell* cell = comp.find_cell(c.name);
    std::string go = *cell_role_port(prog_, *cell, PortRole::kGo);
    auto lat = callee_latency(prog_, *cell);
    std::string name =
        fresh_name(comp, "invoke" + std::to_string(invoke_ids_++) + "_" +
                             c.name);
    std::vector<Assignment> as;
    as.push_back({PortRef::Cell(c.name, go), Constant{1, 1}, {}, c.span});
    for (const Binding& b : c.bindings)
      as.push_back({PortRef::Cell(c.name, b.port), b.value, {}, c.span});
    Attributes attrs = c.attrs;
    if (lat) {
      comp.static_groups.push_back({name, *lat, std::move(as), {}, c.span});
      c = Control::StaticEnable(name);
    } else {
      std::string done = *cell_role_port(prog_, *cell, PortRole::kDone);
      as.push_back({PortRef::Done(name), PortRef::Cell(c.name, done), {},
                    c.span});
      comp.groups.push_back({name, std::move(as), {}, c.span});
      c = Control::Enable(name);
    }
    c.attrs = std::move(attrs);
  });
}

int Sim::make_instance(const Component& src, const std::string& prefix,
                       std::map<std::string, PortId> this_ports) {
  auto owned = std::make_unique<Instance>();
  Instance& inst = *owned;
  int index = static_cast<int>(instances_.size());
  instances_.push_back(std::move(owned));
  inst.prefix = prefix;
  inst.comp = src;
  inst.is_static = src.is_static();
  elaborate_invokes(inst.comp);
  const Component& comp = inst.comp;
  inst.this_ports = std::move(this_ports);
  for (const Cell& cell : comp.cells) {
    int cell_id = static_cast<int>(cells_.size());
    cells_.push_back({prefix + cell.name, true, -1});
    auto& cports = inst.cell_ports[cell.name];
    if (const Component* sub = prog_.find_component(cell.prototype)) {
      std::map<std::string, PortId> sub_ports;
      for (const PortDef& p : sub->ports) {
        PortKind kind =
            p.role == PortRole::kDone ? PortKind::kState : PortKind::kDriven;
        PortId id = add_port(prefix + cell.name + "." + p.name, p.width, kind,
                             cell_id);
        ports_[id].go_role = p.role == PortRole::kGo;
        sub_ports[p.name] = id;
        cports[p.name] = id;
      }
      make_instance(*sub, prefix + cell.name + ".", std::move(sub_ports));
      continue;
    }
    const PrimitiveDecl* prim = find_builtin_primitive(cell.prototype);
    PrimInst pi;
    pi.kind = *primitive_kind(cell.prototype);
    pi.name = prefix + cell.name;
    pi.cell = cell_id;
    pi.width = static_cast<uint32_t>(cell.args.empty() ? 1 : cell.args[0]);
    bool comb = is_combinational(pi.kind);
    cells_[cell_id].stateful = !comb;
    int prim_id = static_cast<int>(prims_.size());
    cells_[cell_id].prim = prim_id;
    for (const PrimitiveDecl::Port& p : prim->ports) {
      PortKind kind = PortKind::kDriven;
      if (p.dir == Direction::kOutput) {
        kind = (comb || (pi.kind == PrimKind::kMemD1 && p.name == "read_data"))
                   ? PortKind::kCellOut
                   : PortKind::kState;
      }
      PortId id = add_port(prefix + cell.name + "." + p.name,
                           *cell_port_width(prog_, cell, p.name), kind,
                           cell_id);
      ports_[id].go_role = p.role == PortRole::kGo;
      pi.ports[p.name] = id;
      cports[p.name] = id;
    }
    if (pi.kind == PrimKind::kMemD1) pi.mem.assign(cell.args.at(1), 0);
    if (prim->latency) pi.latency = *prim->latency;
    if (pi.kind == PrimKind::kMultPipe) pi.latency = *prim->done_latency;
    inst.prims[cell.name] = prim_id;
    prims_.push_back(std::move(pi));
  }
  for (const Group& g : comp.groups) {
    GroupInfo gi;
    gi.name = prefix + g.name;
    gi.go = add_port(prefix + g.name + "[go]", 1, PortKind::kDriven);
    gi.done = add_port(prefix + g.name + "[done]", 1, PortKind::kDriven);
    inst.groups[g.name] = static_cast<int>(groups_.size());
    groups_.push_back(std::move(gi));
  }
  for (const StaticGroup& g : comp.static_groups) {
    GroupInfo gi;
    gi.name = prefix + g.name;
    gi.go = add_port(prefix + g.name + "[go]", 1, PortKind::kDriven);
    gi.counter = static_cast<int>(counters_.size());
    counters_.push_back({0, g.latency});
    inst.groups[g.name] = static_cast<int>(groups_.size());
    groups_.push_back(std::move(gi));
  }
  for (const Group& g : comp.groups) {
    int gid = inst.groups[g.name];
    for (const Assignment& a : g.assignments) {
      bool own_done = a.dst == PortRef::Done(g.name);
      compile_assign(inst, a, gid, own_done ? kNoPort : groups_[gid].go, -1);
    }
  }
  for (const StaticGroup& g : comp.static_groups) {
    int gid = inst.groups[g.name];
    for (const Assignment& a : g.assignments)
      compile_assign(inst, a, gid, groups_[gid].go, groups_[gid].counter);
  }
  for (const Assignment& a : comp.continuous)
    compile_assign(inst, a, -1, kNoPort, -1);
  inst.root = build(inst, comp.control, inst.is_static);
  inst.root_live = inst.root->start();
  return index;
}

PortId Sim::resolve(const Instance& inst, const PortRef& ref) const {
  switch (ref.kind) {
    case PortRef::Kind::kThis:
      return inst.this_ports.at(ref.port);
    case PortRef::Kind::kCell:
      return inst.cell_ports.at(ref.parent).at(ref.port);
    case PortRef::Kind::kHole: {
      const GroupInfo& g = groups_[inst.groups.at(ref.parent)];
      return ref.port == "go" ? g.go : g.done;
    }
  }
  return kNoPort;
}

CAtom Sim::compile_atom(const Instance& inst, const Atom& a) const {
  if (const PortRef* p = as_port(a)) return {false, 0, resolve(inst, *p)};
  return {true, std::get<Constant>(a).value, kNoPort};
}

CGuard Sim::compile_guard(const Instance& inst, const GuardExpr& e) const {
  CGuard g;
  g.kind = e.kind;
  g.op = e.op;
  if (e.kind == GuardExpr::Kind::kPort) g.port = resolve(inst, e.port);
  if (e.kind == GuardExpr::Kind::kCmp) {
    g.lhs = compile_atom(inst, e.operands[0]);
    g.rhs = compile_atom(inst, e.operands[1]);
  }
  for (const GuardExpr& k : e.children)
    g.kids.push_back(compile_guard(inst, k));
  return g;
}

void Sim::compile_assign(Instance& inst, const Assignment& a, int group,
                         PortId gate, int counter) {
  CAssign c;
  c.dst = resolve(inst, a.dst);
  c.src = compile_atom(inst, a.src);
  if (c.src.is_const) c.src.value = mask(c.src.value, ports_[c.dst].width);
  c.guard = compile_guard(inst, a.guard.cond);
  c.gate = gate;
  c.group = group;
  if (counter >= 0 && a.guard.timing) {
    c.counter = counter;
    c.begin = a.guard.timing->begin;
    c.end = a.guard.timing->end;
  }
  int id = static_cast<int>(assigns_.size());
  assigns_.push_back(std::move(c));
  ports_[assigns_[id].dst].assigns.push_back(id);
  if (group >= 0) groups_[group].assigns.push_back(id);
}

std::unique_ptr<Exec> Sim::build(Instance& inst, const Control& c,
                                 bool in_static) {
  using K = Control::Kind;
  if (!in_static && c.is_static()) {
    return std::make_unique<IslandExec>(build(inst, c, true));
  }
  auto kids = [&](bool st) {
    std::vector<std::unique_ptr<Exec>> out;
    for (const Control& k : c.children) out.push_back(build(inst, k, st));
    return out;
  };
  switch (c.kind) {
    case K::kEmpty:
      return std::make_unique<EmptyExec>();
    case K::kEnable: {
      const GroupInfo& g = groups_[inst.groups.at(c.name)];
      return std::make_unique<EnableExec>(*this, g.go, g.done,
                                          inst.groups.at(c.name));
    }
    case K::kStaticEnable: {
      int gid = inst.groups.at(c.name);
      return std::make_unique<StaticEnableExec>(
          groups_[gid].go, counters_[groups_[gid].counter].second, gid);
    }
    case K::kSeq:
      return std::make_unique<SeqExec>(kids(false));
    case K::kStaticSeq:
      return std::make_unique<SeqExec>(kids(true));
    case K::kPar:
      return std::make_unique<ParExec>(kids(false), next_par_id());
    case K::kStaticPar:
      return std::make_unique<ParExec>(kids(true), -1);
    case K::kIf:
      return std::make_unique<IfExec>(*this, resolve(inst, c.cond),
                                      build(inst, c.children[0], false),
                                      build(inst, c.children[1], false));
    case K::kStaticIf: {
      LatencyEnv env(prog_, inst.comp);
      return std::make_unique<StaticIfExec>(
          *this, resolve(inst, c.cond), latency_of(c, env).value_or(0),
          build(inst, c.children[0], true), build(inst, c.children[1], true));
    }
    case K::kWhile: {
      PortId cond = resolve(inst, c.cond);
      const Control& body = c.children[0];
      if (body.is_static())
        return std::make_unique<StaticBodyWhileExec>(*this, cond,
                                                     build(inst, body, true));
      return std::make_unique<WhileExec>(*this, cond,
                                         build(inst, body, false));
    }
    case K::kRepeat:
      return std::make_unique<RepeatExec>(c.count,
                                          build(inst, c.children[0], false));
    case K::kStaticRepeat:
      return std::make_unique<RepeatExec>(c.count,
                                          build(inst, c.children[0], true));
    case K::kInvoke:
    case K::kStaticInvoke:
      break;  // rewritten by elaborate_invokes
  }
  return std::make_unique<EmptyExec>();
}

void Sim::compute_order() {
  std::vector<std::vector<PortId>> deps(ports_.size());
  auto guard_deps = [&](const CGuard& g, std::vector<PortId>& out,
                        auto&& self) -> void {
    if (g.port != kNoPort) out.push_back(g.port);
    if (!g.lhs.is_const) out.push_back(g.lhs.port);
    if (!g.rhs.is_const) out.push_back(g.rhs.port);
    for (const CGuard& k : g.kids) self(k, out, self);
  };
  for (const CAssign& a : assigns_) {
    auto& d = deps[a.dst];
    if (!a.src.is_const) d.push_back(a.src.port);
    if (a.gate != kNoPort) d.push_back(a.gate);
    guard_deps(a.guard, d, guard_deps);
  }
  for (const PrimInst& p : prims_) {
    for (const auto& [n, out] : p.ports) {
      if (ports_[out].kind != PortKind::kCellOut) continue;
      for (const auto& [m, in] : p.ports)
        if (ports_[in].kind == PortKind::kDriven) deps[out].push_back(in);
    }
  }
  std::vector<char> state(ports_.size(), 0);
  std::function<void(PortId)> visit = [&](PortId p) {
    state[p] = 1;
    for (PortId d : deps[p])
      if (state[d] == 0) visit(d);
    state[p] = 2;
    if (ports_[p].kind == PortKind::kDriven ||
        ports_[p].kind == PortKind::kCellOut)
      order_.push_back(p);
  };
  for (PortId p = 0; p < static_cast<PortId>(ports_.size()); ++p)
    if (state[p] == 0) visit(p);
  for (PortId p = 0; p < static_cast<PortId>(ports_.size()); ++p)
    if (ports_[p].kind == PortKind::kDriven) multi_driven_.push_back(p);
}

// Evaluation -----------------------------------------------------------------

bool Sim::guard_true(const CGuard& g) const {
  switch (g.kind) {
    case GuardExpr::Kind::kTrue:
      return true;
    case GuardExpr::Kind::kPort:
      return vals_[g.port] != 0;
    case GuardExpr::Kind::kNot:
      return !guard_true(g.kids[0]);
    case GuardExpr::Kind::kAnd:
      return guard_true(g.kids[0]) && guard_true(g.kids[1]);
    case GuardExpr::Kind::kOr:
      return guard_true(g.kids[0]) || guard_true(g.kids[1]);
    case GuardExpr::Kind::kCmp: {
      uint64_t l = atom_val(g.lhs), r = atom_val(g.rhs);
      switch (g.op) {
        case CmpOp::kEq:
          return l == r;
        case CmpOp::kNeq:
          return l != r;
        case CmpOp::kLt:
          return l < r;
        case CmpOp::kGt:
          return l > r;
        case CmpOp::kLe:
          return l <= r;
        case CmpOp::kGe:
          return l >= r;
      }
    }
  }
  return false;
}

bool Sim::assign_active(const CAssign& a) const {
  if (a.gate != kNoPort && vals_[a.gate] == 0) return false;
  if (a.counter >= 0) {
    uint64_t k = counters_[a.counter].first;
    if (k < a.begin || k >= a.end) return false;
  }
  return guard_true(a.guard);
}

uint64_t Sim::cell_output(const PrimInst& p, PortId out) const {
  auto in = [&](const char* n) { return vals_[p.port(n)]; };
  uint32_t w = ports_[out].width;
  switch (p.kind) {
    case PrimKind::kAdd:
      return mask(in("left") + in("right"), w);
    case PrimKind::kSub:
      return mask(in("left") - in("right"), w);
    case PrimKind::kAnd:
      return in("left") & in("right");
    case PrimKind::kOr:
      return in("left") | in("right");
    case PrimKind::kXor:
      return in("left") ^ in("right");
    case PrimKind::kLsh:
      return in("right") >= w ? 0 : mask(in("left") << in("right"), w);
    case PrimKind::kRsh:
      return in("right") >= w ? 0 : in("left") >> in("right");
    case PrimKind::kLt:
      return in("left") < in("right");
    case PrimKind::kGt:
      return in("left") > in("right");
    case PrimKind::kEq:
      return in("left") == in("right");
    case PrimKind::kNeq:
      return in("left") != in("right");
    case PrimKind::kLe:
      return in("left") <= in("right");
    case PrimKind::kGe:
      return in("left") >= in("right");
    case PrimKind::kNot:
      return mask(~in("in"), w);
    case PrimKind::kWire:
      return in("in");
    case PrimKind::kMemD1: {
      uint64_t addr = in("addr0");
      return addr < p.mem.size() ? p.mem[addr] : 0;
    }
    default:
      return 0;
  }
}

uint64_t Sim::compute(PortId p) const {
  const PortInfo& pi = ports_[p];
  if (pi.kind == PortKind::kCellOut)
    return cell_output(prims_[cells_[pi.cell].prim], p);
  for (int a : pi.assigns) {
    const CAssign& ca = assigns_[a];
    if (assign_active(ca)) return mask(atom_val(ca.src), pi.width);
  }
  for (int c : ctl_by_port_[p])
    if (pred_true(ctl_[c].pred)) return 1;
  return 0;
}

void Sim::begin_cycle() {
  for (PortId p : order_) vals_[p] = 0;
  for (const PrimInst& p : prims_) {
    switch (p.kind) {
      case PrimKind::kReg:
        vals_[p.port("out")] = p.value;
        vals_[p.port("done")] = p.done;
        break;
      case PrimKind::kMemD1:
        vals_[p.port("done")] = p.done;
        break;
      case PrimKind::kMultStatic:
      case PrimKind::kAddPipe:
        vals_[p.port("out")] = p.value;
        break;
      case PrimKind::kMultPipe:
      case PrimKind::kDiv:
        vals_[p.port("out")] = p.value;
        vals_[p.port("done")] = p.phase == PrimInst::Phase::kDonePulse;
        break;
      default:
        break;
    }
  }
  for (auto& inst : instances_) {
    auto it = inst->this_ports.find("done");
    if (it != inst->this_ports.end() &&
        ports_[it->second].kind == PortKind::kState)
      vals_[it->second] = inst->state == Instance::State::kDonePulse;
  }
  ctl_.clear();
  for (auto& v : ctl_by_port_) v.clear();
  for (auto& inst : instances_) emit_instance(*inst, ctl_);
  for (size_t i = 0; i < ctl_.size(); ++i)
    ctl_by_port_[ctl_[i].hole].push_back(static_cast<int>(i));
}

void Sim::settle() {
  size_t cap = order_.size() + 4;
  for (size_t iter = 0;; ++iter) {
    if (iter > cap) {
      std::string where;
      for (PortId p : order_) {
        if (compute(p) != vals_[p]) {
          where = ports_[p].name;
          break;
        }
      }
      fail(SimErrorKind::kCombDivergence, "port '" + where + "' oscillates");
    }
    bool changed = false;
    for (PortId p : order_) {
      uint64_t v = compute(p);
      if (v != vals_[p]) {
        vals_[p] = v;
        changed = true;
      }
    }
    if (!changed) return;
  }
}

void Sim::check_conflicts() {
  for (PortId p : multi_driven_) {
    const PortInfo& pi = ports_[p];
    if (pi.assigns.size() + ctl_by_port_[p].size() < 2) continue;
    std::optional<uint64_t> seen;
    for (int a : pi.assigns) {
      const CAssign& ca = assigns_[a];
      if (!assign_active(ca)) continue;
      uint64_t v = mask(atom_val(ca.src), pi.width);
      if (seen && *seen != v)
        fail(SimErrorKind::kGuardConflict,
             "port '" + pi.name + "' driven with " + std::to_string(*seen) +
                 " and " + std::to_string(v));
      seen = v;
    }
    for (int c : ctl_by_port_[p]) {
      if (!pred_true(ctl_[c].pred)) continue;
      if (seen && *seen != 1)
        fail(SimErrorKind::kGuardConflict,
             "port '" + pi.name + "' driven with " + std::to_string(*seen) +
                 " and 1");
      seen = 1;
    }
  }
}

void Sim::check_races() {
  std::vector<std::pair<int, const Tag*>> active;
  for (const CtlDriver& d : ctl_) {
    if (d.tag.empty() || d.group < 0 || !vals_[d.hole] || !pred_true(d.pred))
      continue;
    active.push_back({d.group, &d.tag});
  }
  if (active.size() < 2) return;
  struct Access {
    const Tag* tag;
    bool write;
    int group;
  };
  std::map<int, std::vector<Access>> by_cell;
  auto reads = [&](const CGuard& g, std::vector<PortId>& out,
                   auto&& self) -> void {
    if (g.port != kNoPort) out.push_back(g.port);
    if (!g.lhs.is_const) out.push_back(g.lhs.port);
    if (!g.rhs.is_const) out.push_back(g.rhs.port);
    for (const CGuard& k : g.kids) self(k, out, self);
  };
  for (const auto& [gid, tag] : active) {
    std::set<std::pair<int, bool>> seen;
    for (int a : groups_[gid].assigns) {
      const CAssign& ca = assigns_[a];
      if (!assign_active(ca)) continue;
      const PortInfo& dst = ports_[ca.dst];
      if (dst.cell >= 0 && cells_[dst.cell].stateful && dst.go_role &&
          vals_[ca.dst])
        seen.insert({dst.cell, true});
      std::vector<PortId> rs;
      if (!ca.src.is_const) rs.push_back(ca.src.port);
      reads(ca.guard, rs, reads);
      for (PortId r : rs) {
        const PortInfo& pi = ports_[r];
        if (pi.cell >= 0 && cells_[pi.cell].stateful)
          seen.insert({pi.cell, false});
      }
    }
    for (const auto& [cell, write] : seen)
      by_cell[cell].push_back({tag, write, gid});
  }
  for (const auto& [cell, acc] : by_cell) {
    for (size_t i = 0; i < acc.size(); ++i) {
      for (size_t j = i + 1; j < acc.size(); ++j) {
        if (!(acc[i].write || acc[j].write)) continue;
        if (!tags_conflict(*acc[i].tag, *acc[j].tag)) continue;
        fail(SimErrorKind::kDataRace,
             "groups '" + groups_[acc[i].group].name + "' and '" +
                 groups_[acc[j].group].name + "' access '" +
                 cells_[cell].name + "' in parallel");
      }
    }
  }
}

void Sim::emit_instance(Instance& inst, std::vector<CtlDriver>& out) {
  switch (inst.state) {
    case Instance::State::kIdle:
      if (inst.root_live)
        inst.root->emit({{inst.this_ports.at("go"), true}}, {}, out);
      break;
    case Instance::State::kRunning:
      inst.root->emit({}, {}, out);
      break;
    case Instance::State::kDonePulse:
      break;
  }
}

void Sim::commit_instance(Instance& inst) {
  auto finish = [&] {
    inst.finished = true;
    if (inst.is_static) {
      inst.state = Instance::State::kIdle;
      inst.root_live = inst.root->start();
    } else {
      inst.state = Instance::State::kDonePulse;
    }
  };
  switch (inst.state) {
    case Instance::State::kIdle:
      if (!vals_[inst.this_ports.at("go")]) return;
      if (!inst.root_live) {
        if (!inst.is_static) finish();
      } else if (inst.root->commit()) {
        finish();
      } else {
        inst.state = Instance::State::kRunning;
      }
      return;
    case Instance::State::kRunning:
      if (inst.root->commit()) finish();
      return;
    case Instance::State::kDonePulse:
      inst.state = Instance::State::kIdle;
      inst.root_live = inst.root->start();
      return;
  }
}

void Sim::commit_prim(PrimInst& p, TraceCycle* rec) {
  auto in = [&](const char* n) { return vals_[p.port(n)]; };
  switch (p.kind) {
    case PrimKind::kReg:
      p.done = in("write_en") != 0;
      if (p.done) {
        p.value = in("in");
        if (rec) rec->writes.push_back(p.name + "=" + std::to_string(p.value));
      }
      break;
    case PrimKind::kMemD1:
      p.done = in("write_en") != 0;
      if (p.done) {
        uint64_t addr = in("addr0");
        if (addr >= p.mem.size())
          fail(SimErrorKind::kMemoryBounds,
               "write to '" + p.name + "[" + std::to_string(addr) + "]'");
        p.mem[addr] = in("write_data");
        if (rec)
          rec->writes.push_back(p.name + "[" + std::to_string(addr) +
                                "]=" + std::to_string(p.mem[addr]));
      }
      break;
    case PrimKind::kMultStatic:
    case PrimKind::kAddPipe:
      if (!in("go")) {
        p.k = 0;
        break;
      }
      if (p.k == 0) {
        p.la = in("left");
        p.lb = in("right");
      }
      if (++p.k == p.latency) {
        p.value = mask(p.kind == PrimKind::kAddPipe ? p.la + p.lb
                                                    : p.la * p.lb,
                       p.width);
        p.k = 0;
      }
      break;
    case PrimKind::kMultPipe:
    case PrimKind::kDiv: {
      bool go = in("go") != 0;
      if (p.phase == PrimInst::Phase::kBusy) {
        ++p.k;
      } else if (go) {
        p.la = in("left");
        p.lb = in("right");
        p.k = 1;
        if (p.kind == PrimKind::kDiv) p.latency = divider_latency(p.la, p.lb);
        p.phase = PrimInst::Phase::kBusy;
      } else {
        p.phase = PrimInst::Phase::kIdle;
      }
      if (p.phase == PrimInst::Phase::kBusy && p.k == p.latency) {
        if (p.kind == PrimKind::kMultPipe) {
          p.value = mask(p.la * p.lb, p.width);
        } else {
          p.value = p.lb == 0 ? mask(~uint64_t{0}, p.width) : p.la / p.lb;
        }
        p.phase = PrimInst::Phase::kDonePulse;
      }
      break;
    }
    default:
      break;
  }
}

void Sim::commit_cycle(TraceCycle* rec) {
  if (rec) {
    for (const GroupInfo& g : groups_)
      if (vals_[g.go]) rec->groups.push_back(g.name);
  }
  for (auto& inst : instances_) commit_instance(*inst);
  for (const GroupInfo& g : groups_) {
    if (g.counter < 0 || !vals_[g.go]) continue;
    auto& [k, n] = counters_[g.counter];
    k = (k + 1) % n;
  }
  for (PrimInst& p : prims_) commit_prim(p, rec);
}

Trace Sim::run(const MemoryMap& init) {
  const Component& entry = prog_.entry_component();
  std::map<std::string, PortId> ports;
  for (const PortDef& p : entry.ports) {
    PortKind kind = p.dir == Direction::kInput ? PortKind::kInput
                    : p.role == PortRole::kDone ? PortKind::kState
                                                : PortKind::kDriven;
    ports[p.name] = add_port(p.name, p.width, kind);
  }
  for (const auto& [name, v] : opts_.inputs) {
    auto it = ports.find(name);
    if (it == ports.end() || ports_[it->second].kind != PortKind::kInput)
      fail(SimErrorKind::kBadInput, "no input port '" + name + "'");
    vals_[it->second] = mask(v, ports_[it->second].width);
  }
  vals_[ports.at("go")] = 1;
  make_instance(entry, "", ports);
  Instance& top = *instances_[0];
  for (const auto& [name, mem] : init) {
    auto it = top.prims.find(name);
    if (it == top.prims.end() || prims_[it->second].kind != PrimKind::kMemD1)
      fail(SimErrorKind::kBadInput, "no memory '" + name + "' in '" +
                                        entry.name + "'");
    PrimInst& p = prims_[it->second];
    if (mem.width != p.width || mem.size != p.mem.size())
      fail(SimErrorKind::kBadInput,
           "memory '" + name + "' is " + std::to_string(p.width) + "x" +
               std::to_string(p.mem.size()) + " but data is " +
               std::to_string(mem.width) + "x" + std::to_string(mem.size));
    for (size_t i = 0; i < mem.data.size(); ++i)
      p.mem[i] = mask(mem.data[i], p.width);
  }
  ctl_by_port_.resize(ports_.size());
  compute_order();

  Trace trace;
  if (top.root_live) {
    for (cycle_ = 0;; ++cycle_) {
      if (cycle_ >= opts_.cycle_limit)
        fail(SimErrorKind::kCycleLimit,
             "limit " + std::to_string(opts_.cycle_limit));
      begin_cycle();
      settle();
      check_races();
      check_conflicts();
      TraceCycle rec;
      rec.cycle = cycle_;
      commit_cycle(opts_.record_trace ? &rec : nullptr);
      if (opts_.record_trace) trace.cycles.push_back(std::move(rec));
      if (top.finished) {
        trace.total_cycles = cycle_ + 1;
        break;
      }
    }
  }
  // Final observation with no control active.
  top.state = Instance::State::kIdle;
  top.root_live = false;
  vals_[ports.at("go")] = 0;
  begin_cycle();
  settle();
  check_conflicts();
  for (const PortDef& p : entry.ports) {
    if (p.dir == Direction::kOutput && p.role == PortRole::kNone)
      trace.final_state.outputs[p.name] = vals_[ports.at(p.name)];
  }
  for (const auto& [name, id] : top.prims) {
    const PrimInst& p = prims_[id];
    if (p.kind == PrimKind::kMemD1) {
      trace.final_state.memories[name] =
          Memory{p.width, p.mem.size(), p.mem};
    } else if (p.kind == PrimKind::kReg) {
      trace.registers[name] = p.value;
    }
  }
  return trace;
}

}  // namespace

Trace simulate(const Program& prog, const MemoryMap& init,
               const SimOptions& opts) {
  return Sim(prog, opts).run(init);
}

RefinementVerdict check_refinement(const Program& original,
                                   const Program& refined,
                                   const MemoryMap& init,
                                   const SimOptions& opts) {
  auto run = [&](const Program& p, const char* side) {
    try {
      return simulate(p, init, opts);
    } catch (const SimError& e) {
      throw SimError(e.kind(), e.cycle(), std::string(side) + ": " + e.what());
    }
  };
  Trace a = run(original, "original");
  Trace b = run(refined, "refined");
  RefinementVerdict v;
  v.original_cycles = a.total_cycles;
  v.refined_cycles = b.total_cycles;
  v.ok = a.final_state == b.final_state;
  if (!v.ok) {
    for (const auto& [name, m] : a.final_state.memories) {
      auto it = b.final_state.memories.find(name);
      if (it == b.final_state.memories.end()) {
        v.detail = "memory '" + name + "' missing";
        break;
      }
      for (size_t i = 0; i < m.data.size(); ++i) {
        if (i >= it->second.data.size() || m.data[i] != it->second.data[i]) {
          v.detail = "memory '" + name + "[" + std::to_string(i) + "]' differs";
          break;
        }
      }
      if (!v.detail.empty()) break;
    }
    for (const auto& [name, x] : a.final_state.outputs) {
      if (!v.detail.empty()) break;
      auto it = b.final_state.outputs.find(name);
      if (it == b.final_state.outputs.end() || it->second != x)
        v.detail = "output '" + name + "' differs";
    }
    if (v.detail.empty()) v.detail = "observable state differs";
  }
  return v;
}

}  // namespace uil
