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


// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <regex>
#include <sstream>
#include <thread>

#include "islands.hpp"
#include "test_util.hpp"
#include "uil/analysis.hpp"
#include "uil/fuzz.hpp"
#include "uil/lower.hpp"
#include "uil/opt.hpp"
#include "uil/pipeline.hpp"
#include "uil/sim.hpp"
#include "uil/text.hpp"

namespace uil {
namespace {

using testing::load;
using Clock = std::chrono::steady_clock;

// Tolerances and budgets.
constexpr double kCompactionBudgetSec = 1.0;
constexpr double kLatencyBudgetSec = 10.0;
constexpr double kFuzzBudgetSec = 300.0;
constexpr int kIslands = 200;
constexpr uint64_t kFuzzPrograms = 1000;
constexpr Cycles kCompactedIsland = 11;
constexpr Cycles kSequentialIsland = 22;
constexpr int kStrictKernels = 3;

struct Result {
  bool ok = true;
  std::ostringstream note;

  void fail(const std::string& why) {
    if (ok) note.str("");
    ok = false;
    note << why << "; ";
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::optional<std::pair<Cycles, Cycles>> span_of(
    const Trace& t, const std::function<bool(const std::string&)>& pick) {
  std::optional<std::pair<Cycles, Cycles>> span;
  for (const TraceCycle& c : t.cycles) {
    for (const std::string& g : c.groups) {
      if (!pick(g)) continue;
      if (!span) span = {c.cycle, c.cycle};
      span->second = c.cycle;
    }
  }
  return span;
}

Cycles width(const std::pair<Cycles, Cycles>& s) { return s.second - s.first + 1; }

SimOptions traced() {
  SimOptions o;
  o.record_trace = true;
  return o;
}

void compaction(Result& r) {
  auto start = Clock::now();
  Program p = load("tests/fixtures/compaction.uil");
  auto island = [](const std::string& g) {
    return g.size() == 1 || g.find("delay") != std::string::npos;
  };
  Program before = run_pipeline(p, parse_pipeline("infer-static,static-promote"));
  Program after = run_pipeline(
      p, parse_pipeline("infer-static,static-promote,schedule-compaction"));
  Trace tb = simulate(before, {}, traced());
  Trace ta = simulate(after, {}, traced());
  auto sb = span_of(tb, island), sa = span_of(ta, island);
  double sec = seconds_since(start);
  if (!sb || !sa) return r.fail("island not found in trace");
  r.note << "island " << width(*sb) << " -> " << width(*sa) << " cycles, "
         << sec << " s";
  if (width(*sb) != kSequentialIsland) r.fail("sequential island is not 22");
  if (width(*sa) != kCompactedIsland) r.fail("compacted island is not 11");
  if (!(ta.final_state == tb.final_state)) r.fail("final state changed");
  if (sec >= kCompactionBudgetSec) r.fail("over time budget");
}

std::string strip_suffixes(std::string s) {
  static const std::regex suffix(R"((comp_(par|seq))_[0-9]+)");
  return std::regex_replace(s, suffix, "$1");
}

void collapse(Result& r) {
  for (const char* name : {"comp_par", "comp_seq"}) {
    std::string base = name;
    Program p = load("tests/fixtures/" + base + ".uil");
    Program q = run_pipeline(p, Pipeline{"custom", {Pass::kCollapseStatic}});
    std::string printed = testing::squash(strip_suffixes(print(q)));
    std::string golden;
    std::istringstream in(
        testing::read_source("tests/fixtures/golden/" + base + ".uil"));
    for (std::string line; std::getline(in, line);)
      if (line.rfind("//", 0) != 0) golden += line + "\n";
    golden = testing::squash(golden);
    size_t at = golden.find("control {");
    std::string group = golden.substr(0, at - 1);
    std::string control = golden.substr(at);
    bool ok = printed.find(group) != std::string::npos &&
              printed.find(control) != std::string::npos;
    r.note << name << (ok ? " matches" : " differs") << " ";
    if (!ok) r.fail(base + " listing differs");
  }
}

void latency_algebra(Result& r) {
  auto start = Clock::now();
  testing::IslandGenerator gen(2026);
  int matched = 0;
  for (int i = 0; i < kIslands; ++i) {
    testing::Island island = gen.next();
    Program p = parse_valid(island.text, "island");
    const Component& comp = p.entry_component();
    auto algebra = latency_of(comp.control, LatencyEnv(p, comp));
    std::string root;
    PipelineOptions opts;
    opts.after_pass = [&](Pass pass, const Program& q) {
      if (pass == Pass::kCollapseStatic) root = q.entry_component().control.name;
    };
    Program lowered = run_pipeline(p, parse_pipeline("lower"), opts);
    SimOptions so = traced();
    so.inputs = {{"c", island.cond}};
    Trace t = simulate(lowered, {}, so);
    auto span = span_of(t, [&](const std::string& g) { return g == root; });
    Trace direct = simulate(p, {}, so);
    bool ok = algebra && *algebra == island.latency && span &&
              width(*span) == island.latency &&
              direct.total_cycles == island.latency + 1 &&
              t.final_state == direct.final_state;
    if (ok) {
      ++matched;
    } else if (r.ok) {
      r.fail("island " + std::to_string(i) + " oracle " +
             std::to_string(island.latency));
    }
  }
  double sec = seconds_since(start);
  r.note << matched << "/" << kIslands << " islands, " << sec << " s";
  if (sec >= kLatencyBudgetSec) r.fail("over time budget");
}

std::string counted_loop(Cycles body, uint64_t n) {
  std::string b = std::to_string(body);
  std::string last = std::to_string(body - 1) + ":" + b;
  return R"(
    component main() -> (i_out: 16) {
      cells { i = std_reg(16); inc = std_add(16); lt = std_lt(16); }
      wires {
        static<)" + b + R"(> group body {
          inc.left = i.out; inc.right = 16'd1;
          i.in = %[)" + last + R"(] ? inc.out;
          i.write_en = %[)" + last + R"(] ? 1'd1;
        }
        lt.left = i.out; lt.right = 16'd)" + std::to_string(n) + R"(;
        i_out = i.out;
      }
      control { while lt.out { body; } }
    })";
}

void while_fastpath(Result& r) {
  for (Cycles b : {1, 2, 5}) {
    for (uint64_t n : {10, 100}) {
      Program p = parse_valid(counted_loop(b, n));
      Trace fast = simulate(lower(p), {});
      Trace naive = simulate(lower(p, LowerOptions{.while_fastpath = false}), {});
      r.note << "b=" << b << ",n=" << n << ": " << fast.total_cycles << "/"
             << naive.total_cycles << " ";
      if (fast.total_cycles > n * b + 2) r.fail("fast path too slow");
      if (naive.total_cycles < n * (b + 1)) r.fail("naive path too fast");
      if (fast.final_state.outputs.at("i_out") != n ||
          naive.final_state.outputs.at("i_out") != n)
        r.fail("wrong iteration count");
    }
  }
}

void refinement_fuzz(Result& r) {
  auto start = Clock::now();
  uint64_t seed = default_fuzz_seed();
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  FuzzSummary s = run_fuzz(seed, kFuzzPrograms, workers);
  double sec = seconds_since(start);
  uint64_t slower = 0;
  for (const FuzzOutcome& o : s.outcomes)
    for (const auto& [name, cycles] : o.preset_cycles)
      if (cycles > o.dynamic_cycles) ++slower;
  r.note << s.count - s.failures << "/" << s.count << " preserved (seed "
         << seed << "), " << sec << " s";
  if (s.count != kFuzzPrograms) r.fail("wrong program count");
  for (const FuzzOutcome& o : s.outcomes)
    if (!o.ok) r.fail("seed " + std::to_string(o.seed) + ": " + o.detail);
  if (slower) r.fail(std::to_string(slower) + " slower runs");
  if (sec >= kFuzzBudgetSec) r.fail("over time budget");
}

size_t count_cells(const Program& p, const std::string& proto) {
  size_t n = 0;
  for (const Cell& c : p.entry_component().cells) n += c.prototype == proto;
  return n;
}

void sharing(Result& r) {
  Program s = load("tests/fixtures/share_static_par.uil");
  share_cells(s, s.components[0]);
  Program d = load("tests/fixtures/share_dynamic_par.uil");
  share_cells(d, d.components[0]);
  size_t ns = count_cells(s, "std_mult"), nd = count_cells(d, "std_mult_pipe");
  r.note << "static par " << ns << " multiplier(s), dynamic par " << nd;
  if (ns != 1) r.fail("static par fixture not shared");
  if (nd != 2) r.fail("dynamic par fixture shared");
}

void kernels(Result& r) {
  int strict = 0;
  for (const char* name : {"dot", "matvec", "stencil2d", "triangular"}) {
    std::string base = std::string("kernels/") + name;
    Program p = load(base + ".uil");
    MemoryMap init = testing::load_memories(base + ".json");
    std::map<std::string, Trace> runs;
    for (const std::string& n : preset_names())
      runs[n] = simulate(run_pipeline(p, parse_pipeline(n)), init);
    Cycles b = runs["B"].total_cycles, sh = runs["SH"].total_cycles,
           sc = runs["SC"].total_cycles;
    char speed[32];
    std::snprintf(speed, sizeof speed, "%.2fx", double(b) / double(sc));
    r.note << name << " B/SH/SC " << b << "/" << sh << "/" << sc << " (" << speed
           << ") ";
    if (!(sc <= sh && sh <= b)) r.fail(std::string(name) + " ordering");
    strict += sc < b;
    for (const auto& [n, t] : runs)
      if (!(t.final_state.memories == runs["B"].final_state.memories))
        r.fail(std::string(name) + " memories differ under " + n);
  }
  if (strict < kStrictKernels) r.fail("too few strict improvements");
}

void gapless(Result& r) {
  for (Cycles g : {1, 3, 4}) {
    for (uint64_t n : {2, 5, 9}) {
      std::string len = std::to_string(g);
      std::string last = std::to_string(g - 1) + ":" + len;
      Program p = parse_valid(R"(
        component main() -> (x: 8) {
          cells { r = std_reg(8); a = std_add(8); }
          wires {
            static<)" + len + R"(> group g {
              a.left = r.out; a.right = 8'd1;
              r.in = %[)" + last + R"(] ? a.out;
              r.write_en = %[)" + last + R"(] ? 1'd1;
            }
            x = r.out;
          }
          control { static repeat )" + std::to_string(n) + R"( { g; } }
        })");
      std::string root;
      PipelineOptions opts;
      opts.after_pass = [&](Pass pass, const Program& q) {
        if (pass == Pass::kCollapseStatic) root = q.entry_component().control.name;
      };
      Trace t = simulate(run_pipeline(p, parse_pipeline("lower"), opts), {},
                         traced());
      Cycles active = 0;
      for (const TraceCycle& c : t.cycles)
        active += std::count(c.groups.begin(), c.groups.end(), root);
      auto span = span_of(t, [&](const std::string& x) { return x == root; });
      if (!span || width(*span) != n * g || active != n * g)
        r.fail("|g|=" + len + " n=" + std::to_string(n));
      if (t.final_state.outputs.at("x") != n) r.fail("wrong count");
    }
  }
  if (r.ok) r.note << "9 configurations span n*|g|";
}

}  // namespace
}  // namespace uil

int main() {
  using Check = std::pair<const char*, void (*)(uil::Result&)>;
  const Check checks[] = {
      {"compaction-golden", uil::compaction},
      {"collapse-golden", uil::collapse},
      {"latency-algebra", uil::latency_algebra},
      {"while-fastpath", uil::while_fastpath},
      {"refinement-fuzz", uil::refinement_fuzz},
      {"share-static-par", uil::sharing},
      {"pipeline-ordering", uil::kernels},
      {"fsm-gapless", uil::gapless},
  };
  int failed = 0;
  for (const auto& [name, fn] : checks) {
    uil::Result r;
    try {
      fn(r);
    } catch (const std::exception& e) {
      r.fail(std::string("exception: ") + e.what());
    }
    std::cout << (r.ok ? "PASS " : "FAIL ") << name << ": " << r.note.str()
              << std::endl;
    failed += !r.ok;
  }
  return failed == 0 ? 0 : 1;
}
