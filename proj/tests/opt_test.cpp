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


#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "test_util.hpp"
#include "uil/analysis.hpp"
#include "uil/opt.hpp"
#include "uil/pipeline.hpp"
#include "uil/sim.hpp"
#include "uil/text.hpp"

namespace uil {
namespace {

using testing::load;

constexpr const char* kTiming = R"(
  component main() -> (out: 32) {
    cells {
      r = std_reg(32); s = std_reg(32);
      m = std_mult_pipe(32); d = std_div(32);
    }
    wires {
      group wr { r.in = 32'd3; r.write_en = 1'd1; wr[done] = r.done; }
      group mul {
        m.left = r.out; m.right = 32'd5; m.go = !m.done ? 1'd1;
        s.in = m.out; s.write_en = m.done;
        mul[done] = s.done;
      }
      group div {
        d.left = s.out; d.right = 32'd2; d.go = !d.done ? 1'd1;
        r.in = d.out; r.write_en = d.done;
        div[done] = r.done;
      }
      group self { r.in = 32'd1; r.write_en = 1'd1; self[done] = self[go]; }
      out = r.out;
    }
    control { seq { wr; mul; div; } }
  })";

std::optional<Cycles> group_latency(const Program& p, const std::string& g) {
  const Component& c = p.entry_component();
  return infer_group_latency(p, c, *c.find_group(g));
}

TEST(Infer, GroupLatencies) {
  Program p = parse_valid(kTiming);
  EXPECT_EQ(group_latency(p, "wr"), 1u);
  EXPECT_EQ(group_latency(p, "mul"), 4u);
  EXPECT_EQ(group_latency(p, "div"), std::nullopt);
  EXPECT_EQ(group_latency(p, "self"), std::nullopt);
}

TEST(Infer, AnnotatesGroupsAndControl) {
  Program p = parse_valid(kTiming);
  Component& c = p.components[0];
  EXPECT_TRUE(infer_static_timing(p, c).empty());
  EXPECT_EQ(c.find_group("wr")->attrs.at(kStaticHint), 1u);
  EXPECT_EQ(c.find_group("mul")->attrs.at(kStaticHint), 4u);
  EXPECT_EQ(c.find_group("div")->attrs.count(kStaticHint), 0u);
  EXPECT_EQ(c.control.attrs.count(kStaticHint), 0u);
}

TEST(Infer, WarnsOnWrongAnnotation) {
  Program p = parse_valid(R"(
    component main() -> () {
      cells { r = std_reg(8); }
      wires { @static(3) group g { r.in = 8'd1; r.write_en = 1'd1; g[done] = r.done; } }
      control { g; }
    })");
  auto diags = infer_static_timing(p, p.components[0]);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].severity, Diagnostic::Severity::kWarning);
  EXPECT_EQ(p.components[0].find_group("g")->attrs.at(kStaticHint), 1u);
}

TEST(Infer, PredictedDynamicCycles) {
  Program p = parse_valid(kTiming);
  Component& c = p.components[0];
  infer_static_timing(p, c);
  EXPECT_EQ(predicted_dynamic_cycles(p, c, Control::Enable("wr")), 2u);
  EXPECT_EQ(predicted_dynamic_cycles(p, c, Control::Enable("div")), std::nullopt);
  Control two = Control::Seq({Control::Enable("wr"), Control::Enable("mul")});
  EXPECT_EQ(predicted_dynamic_cycles(p, c, two), 2u + 5u);
  EXPECT_EQ(predicted_dynamic_cycles(p, c, Control::Repeat(3, two)), 21u);
}

constexpr const char* kRegs = R"(
  component main() -> (out: 8) {
    cells { a = std_reg(8); b = std_reg(8); c = std_reg(8); d = std_div(8); }
    wires {
      group wa { a.in = 8'd6; a.write_en = 1'd1; wa[done] = a.done; }
      group wb { b.in = a.out; b.write_en = 1'd1; wb[done] = b.done; }
      group wc { c.in = b.out; c.write_en = 1'd1; wc[done] = c.done; }
      group div {
        d.left = c.out; d.right = 8'd2; d.go = !d.done ? 1'd1;
        a.in = d.out; a.write_en = d.done; div[done] = a.done;
      }
      out = a.out;
    }
    control { seq { wa; div; wb; wc; wa; } }
  })";

Program promoted(const std::string& text, PromotionConfig cfg = {}) {
  Program p = parse_valid(text);
  PipelineOptions opts;
  opts.promote = cfg;
  return run_pipeline(p, Pipeline{"custom", {Pass::kInferStatic, Pass::kStaticPromote}},
                      opts);
}

TEST(Promote, PromotesStaticRunsInsideDynamicSeq) {
  Program q = promoted(kRegs);
  const Control& top = q.entry_component().control;
  ASSERT_EQ(top.kind, Control::Kind::kSeq);
  size_t runs = 0;
  for (const Control& k : top.children) {
    if (k.kind != Control::Kind::kStaticSeq) continue;
    ++runs;
    EXPECT_EQ(k.attrs.at(kPromotedAttr), 1u);
    EXPECT_EQ(k.children.size(), 3u);
  }
  EXPECT_EQ(runs, 1u);
  EXPECT_EQ(top.children[1].kind, Control::Kind::kEnable);
  RefinementVerdict v = check_refinement(parse_valid(kRegs), q, {});
  EXPECT_TRUE(v.ok) << v.detail;
  EXPECT_LT(v.refined_cycles, v.original_cycles);
}

TEST(Promote, ThresholdAndCycleCap) {
  PromotionConfig strict;
  strict.threshold = 10;
  Program q = promoted(kRegs, strict);
  walk(q.entry_component().control, [](const Control& c) {
    EXPECT_FALSE(c.kind == Control::Kind::kStaticSeq);
  });
  PromotionConfig capped;
  capped.max_cycles = 2;
  Program r = promoted(kRegs, capped);
  walk(r.entry_component().control, [](const Control& c) {
    EXPECT_FALSE(c.kind == Control::Kind::kStaticSeq);
  });
}

TEST(Promote, WholeTreeBecomesStatic) {
  Program p = parse_valid(R"(
    component main() -> (out: 8) {
      cells { a = std_reg(8); b = std_reg(8); }
      wires {
        group wa { a.in = 8'd6; a.write_en = 1'd1; wa[done] = a.done; }
        group wb { b.in = 8'd9; b.write_en = 1'd1; wb[done] = b.done; }
        out = b.out;
      }
      control { seq { wa; repeat 3 { par { wa; wb; } } } }
    })");
  Program q = promoted(print(p));
  const Component& c = q.entry_component();
  EXPECT_TRUE(c.control.is_static());
  EXPECT_EQ(latency_of(c.control, LatencyEnv(q, c)), 4u);
  EXPECT_TRUE(c.groups.empty());
  RefinementVerdict v = check_refinement(p, q, {});
  EXPECT_TRUE(v.ok) << v.detail;
  EXPECT_EQ(v.original_cycles, 2u + 3u * 2u);
  EXPECT_EQ(v.refined_cycles, 5u);
}

TEST(Promote, KeepsGroupWhenHoleIsRead) {
  Program p = parse_valid(R"(
    component main() -> (busy: 1) {
      cells { a = std_reg(8); b = std_reg(8); }
      wires {
        group wa { a.in = 8'd6; a.write_en = 1'd1; wa[done] = a.done; }
        group wb { b.in = a.out; b.write_en = 1'd1; wb[done] = b.done; }
        busy = wa[go];
      }
      control { seq { wa; wb; } }
    })");
  Program q = promoted(print(p));
  const Component& c = q.entry_component();
  EXPECT_NE(c.find_group("wa"), nullptr);
  EXPECT_TRUE(c.control.is_static());
}

TEST(Compaction, FixtureDependencies) {
  Program p = load("tests/fixtures/compaction.uil");
  const Component& c = p.entry_component();
  auto edges = seq_dependencies(p, c, c.control);
  ASSERT_TRUE(edges.has_value());
  std::set<std::pair<size_t, size_t>> got(edges->begin(), edges->end());
  EXPECT_EQ(got, (std::set<std::pair<size_t, size_t>>{{1, 2}, {0, 3}}));
  Schedule s = asap_schedule({1, 10, 1, 10}, *edges);
  EXPECT_EQ(s.start, (std::vector<Cycles>{0, 0, 10, 1}));
  EXPECT_EQ(s.makespan, 11u);
}

TEST(Compaction, ChainAndIndependentExamples) {
  Schedule chain = asap_schedule({2, 3, 4}, {{0, 1}, {1, 2}});
  EXPECT_EQ(chain.start, (std::vector<Cycles>{0, 2, 5}));
  EXPECT_EQ(chain.makespan, 9u);
  Schedule free = asap_schedule({3, 3, 3}, {});
  EXPECT_EQ(free.start, (std::vector<Cycles>{0, 0, 0}));
  EXPECT_EQ(free.makespan, 3u);
}

// Longest chain under the transitive closure of the edges, by enumerating
// every subset of nodes.
Cycles longest_chain(const std::vector<Cycles>& lat,
                     const std::vector<std::pair<size_t, size_t>>& edges) {
  size_t n = lat.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n));
  for (auto [u, v] : edges) reach[u][v] = true;
  for (size_t k = 0; k < n; ++k)
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  Cycles best = 0;
  for (uint32_t mask = 1; mask < (1u << n); ++mask) {
    Cycles sum = 0;
    bool chain = true;
    for (size_t i = 0; i < n && chain; ++i) {
      if (!(mask >> i & 1)) continue;
      sum += lat[i];
      for (size_t j = i + 1; j < n; ++j)
        if (mask >> j & 1 && !reach[i][j]) chain = false;
    }
    if (chain) best = std::max(best, sum);
  }
  return best;
}

TEST(Compaction, AsapIsOptimalOnSmallGraphs) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    size_t n = 1 + rng() % 6;
    std::vector<Cycles> lat(n);
    for (Cycles& l : lat) l = 1 + rng() % 5;
    std::vector<std::pair<size_t, size_t>> edges;
    for (size_t j = 0; j < n; ++j)
      for (size_t i = 0; i < j; ++i)
        if (rng() % 3 == 0) edges.push_back({i, j});
    Schedule s = asap_schedule(lat, edges);
    for (auto [u, v] : edges) EXPECT_GE(s.start[v], s.start[u] + lat[u]);
    EXPECT_EQ(s.makespan, longest_chain(lat, edges));
  }
}

std::optional<std::pair<Cycles, Cycles>> island_span(const Trace& t) {
  std::optional<std::pair<Cycles, Cycles>> span;
  for (const TraceCycle& c : t.cycles) {
    for (const std::string& g : c.groups) {
      bool ours = g.size() == 1 || g.find("delay") != std::string::npos;
      if (!ours) continue;
      if (!span) span = {c.cycle, c.cycle};
      span->second = c.cycle;
    }
  }
  return span;
}

TEST(Compaction, FixtureIslandShrinks) {
  Program p = load("tests/fixtures/compaction.uil");
  Program before = run_pipeline(p, parse_pipeline("infer-static,static-promote"));
  Program after = run_pipeline(
      p, parse_pipeline("infer-static,static-promote,schedule-compaction"));
  SimOptions o;
  o.record_trace = true;
  Trace tb = simulate(before, {}, o);
  Trace ta = simulate(after, {}, o);
  auto sb = island_span(tb), sa = island_span(ta);
  ASSERT_TRUE(sb && sa);
  EXPECT_EQ(sb->second - sb->first + 1, 22u);
  EXPECT_EQ(sa->second - sa->first + 1, 11u);
  EXPECT_EQ(tb.final_state, ta.final_state);
  EXPECT_EQ(ta.final_state.outputs.at("c_out"), 31u);
  EXPECT_EQ(ta.final_state.outputs.at("d_out"), 9u);
}

TEST(Compaction, LeavesDynamicSeqAlone) {
  Program p = parse_valid(kRegs);
  Program q = p;
  compact_schedule(q, q.components[0]);
  EXPECT_EQ(q, p);
}

uint64_t count_cells(const Program& p, const std::string& proto) {
  const auto& cells = p.entry_component().cells;
  return std::count_if(cells.begin(), cells.end(),
                       [&](const Cell& c) { return c.prototype == proto; });
}

TEST(Share, StaticParWithDisjointWindows) {
  Program p = load("tests/fixtures/share_static_par.uil");
  Program q = p;
  share_cells(q, q.components[0]);
  EXPECT_EQ(count_cells(p, "std_mult"), 2u);
  EXPECT_EQ(count_cells(q, "std_mult"), 1u);
  Trace t = simulate(q, {});
  EXPECT_EQ(t.final_state.outputs.at("p1"), 42u);
  EXPECT_EQ(t.final_state.outputs.at("p2"), 15u);
  EXPECT_TRUE(check_refinement(p, q, {}).ok);
}

TEST(Share, DynamicParKeepsBoth) {
  Program p = load("tests/fixtures/share_dynamic_par.uil");
  Program q = p;
  share_cells(q, q.components[0]);
  EXPECT_EQ(count_cells(q, "std_mult_pipe"), 2u);
}

TEST(Share, SequentialAddersMerge) {
  Program p = parse_valid(R"(
    component main() -> (x: 8, y: 8) {
      cells { a = std_reg(8); b = std_reg(8); p = std_add(8); q = std_add(8); }
      wires {
        group ga { p.left = 8'd2; p.right = 8'd3; a.in = p.out; a.write_en = 1'd1; ga[done] = a.done; }
        group gb { q.left = a.out; q.right = 8'd4; b.in = q.out; b.write_en = 1'd1; gb[done] = b.done; }
        x = a.out; y = b.out;
      }
      control { seq { ga; gb; } }
    })");
  Program q = p;
  share_cells(q, q.components[0]);
  EXPECT_EQ(count_cells(q, "std_add"), 1u);
  RefinementVerdict v = check_refinement(p, q, {});
  EXPECT_TRUE(v.ok) << v.detail;
  EXPECT_EQ(simulate(q, {}).final_state.outputs.at("y"), 9u);
}

TEST(Share, ExcludesContinuousAndSimultaneousUses) {
  Program p = parse_valid(R"(
    component main() -> (x: 8, y: 8, z: 8) {
      cells {
        a = std_reg(8); b = std_reg(8);
        p = std_add(8); q = std_add(8); k = std_add(8);
      }
      wires {
        group g {
          p.left = 8'd2; p.right = 8'd3; q.left = 8'd1; q.right = 8'd1;
          a.in = p.out; a.write_en = 1'd1; b.in = q.out; b.write_en = 1'd1;
          g[done] = a.done;
        }
        k.left = a.out; k.right = b.out;
        x = a.out; y = b.out; z = k.out;
      }
      control { g; }
    })");
  Program q = p;
  share_cells(q, q.components[0]);
  EXPECT_EQ(count_cells(q, "std_add"), 3u);
}

TEST(Share, DifferentWidthsStayApart) {
  Program p = parse_valid(R"(
    component main() -> (x: 8, y: 16) {
      cells { a = std_reg(8); b = std_reg(16); p = std_add(8); q = std_add(16); }
      wires {
        group ga { p.left = 8'd2; p.right = 8'd3; a.in = p.out; a.write_en = 1'd1; ga[done] = a.done; }
        group gb { q.left = 16'd2; q.right = 16'd4; b.in = q.out; b.write_en = 1'd1; gb[done] = b.done; }
        x = a.out; y = b.out;
      }
      control { seq { ga; gb; } }
    })");
  Program q = p;
  share_cells(q, q.components[0]);
  EXPECT_EQ(q.entry_component().cells.size(), 4u);
}

}  // namespace
}  // namespace uil
