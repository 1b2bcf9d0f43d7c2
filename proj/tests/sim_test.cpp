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

#include "test_util.hpp"
#include "uil/analysis.hpp"
#include "uil/fuzz.hpp"
#include "uil/lower.hpp"
#include "uil/sim.hpp"
#include "uil/text.hpp"

namespace uil {
namespace {

using testing::load;

SimOptions with_inputs(std::map<std::string, uint64_t> inputs,
                       bool trace = true) {
  SimOptions o;
  o.inputs = std::move(inputs);
  o.record_trace = trace;
  return o;
}

SimErrorKind error_kind(const Program& p, const SimOptions& opts = {},
                        const MemoryMap& init = {}) {
  try {
    simulate(p, init, opts);
  } catch (const SimError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "simulation did not fail";
  return SimErrorKind::kBadInput;
}

TEST(Sim, ExpressionIslandThenDivide) {
  Program p = load("tests/fixtures/expr.uil");
  Trace t = simulate(p, {}, with_inputs({{"a", 2}, {"b", 3}, {"c", 4}, {"d", 5}}));
  EXPECT_EQ(t.final_state.outputs.at("out"), (2 + 3) * 4 / 5);
  auto add = t.active_span("do_add");
  auto mult = t.active_span("do_mult");
  ASSERT_TRUE(add && mult);
  EXPECT_EQ(add->first, 0u);
  EXPECT_EQ(mult->second - add->first + 1, 4u);  // island of 1 + 3 cycles
  EXPECT_EQ(t.total_cycles, 11u);
}

TEST(Sim, MultiplyAndStore) {
  Trace t = simulate(load("tests/fixtures/mult_and_store.uil"), {},
                     with_inputs({}));
  EXPECT_EQ(t.registers.at("ans"), 42u);
  EXPECT_EQ(t.active_span("mult_and_store"), std::make_pair(Cycles{0}, Cycles{3}));
  EXPECT_EQ(t.total_cycles, 5u);
}

TEST(Sim, DataRaceBetweenParThreads) {
  Program p = parse_valid(R"(
    component main() -> () {
      cells { r = std_reg(8); s = std_reg(8); }
      wires {
        group w { r.in = 8'd1; r.write_en = 1'd1; w[done] = r.done; }
        group rd { s.in = r.out; s.write_en = 1'd1; rd[done] = s.done; }
      }
      control { par { w; rd; } }
    })");
  EXPECT_EQ(error_kind(p), SimErrorKind::kDataRace);
}

TEST(Sim, GuardConflictAtRuntime) {
  Program p = parse_valid(R"(
    component main(c: 1) -> (o: 8) {
      cells {}
      wires { o = c ? 8'd1; o = 8'd2; }
      control {}
    })");
  EXPECT_NO_THROW(simulate(p, {}, with_inputs({{"c", 0}})));
  EXPECT_EQ(error_kind(p, with_inputs({{"c", 1}})), SimErrorKind::kGuardConflict);
}

TEST(Sim, CombinationalDivergence) {
  ParseResult r = parse(R"(
    component main() -> () {
      cells { inv = std_not(1); }
      wires { inv.in = inv.out; }
      control {}
    })");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(error_kind(*r.program), SimErrorKind::kCombDivergence);
}

TEST(Sim, CycleLimit) {
  Program p = parse_valid(R"(
    component main(c: 1) -> () {
      cells { r = std_reg(8); }
      wires { group g { r.in = 8'd1; r.write_en = 1'd1; g[done] = r.done; } }
      control { while c { g; } }
    })");
  SimOptions o = with_inputs({{"c", 1}}, false);
  o.cycle_limit = 100;
  EXPECT_EQ(error_kind(p, o), SimErrorKind::kCycleLimit);
}

TEST(Sim, MemoryBounds) {
  Program p = parse_valid(R"(
    component main() -> () {
      cells { m = std_mem_d1(8, 4, 3); }
      wires {
        group g { m.addr0 = 3'd5; m.write_data = 8'd1; m.write_en = 1'd1;
                  g[done] = m.done; }
      }
      control { g; }
    })");
  EXPECT_EQ(error_kind(p), SimErrorKind::kMemoryBounds);
}

TEST(Sim, StaticIfReadsConditionOnce) {
  // The then-branch clears the condition in its first cycle but must still
  // run to completion.
  Program p = parse_valid(R"(
    component main() -> () {
      cells { flag = std_reg(1); x = std_reg(8); y = std_reg(8); }
      wires {
        group set { flag.in = 1'd1; flag.write_en = 1'd1; set[done] = flag.done; }
        static<3> group T {
          flag.in = %0 ? 1'd0;
          flag.write_en = %0 ? 1'd1;
          x.in = %2 ? 8'd7;
          x.write_en = %2 ? 1'd1;
        }
        static<3> group E { y.in = %2 ? 8'd9; y.write_en = %2 ? 1'd1; }
      }
      control { seq { set; static if flag.out { T; } else { E; } } }
    })");
  Trace t = simulate(p, {}, with_inputs({}));
  EXPECT_EQ(t.registers.at("x"), 7u);
  EXPECT_EQ(t.registers.at("y"), 0u);
  EXPECT_EQ(t.registers.at("flag"), 0u);
  EXPECT_FALSE(t.active_span("E").has_value());
  RefinementVerdict v = check_refinement(p, lower(p), {});
  EXPECT_TRUE(v.ok) << v.detail;
}

TEST(Sim, StaticRepeatIsGapless) {
  Program p = parse_valid(R"(
    component main() -> () {
      cells { r = std_reg(8); a = std_add(8); }
      wires {
        static<3> group g {
          a.left = r.out;
          a.right = 8'd1;
          r.in = %2 ? a.out;
          r.write_en = %2 ? 1'd1;
        }
      }
      control { static repeat 5 { g; } }
    })");
  for (const Program& q : {p, lower(p)}) {
    Trace t = simulate(q, {}, with_inputs({}));
    EXPECT_EQ(t.registers.at("r"), 5u);
    EXPECT_EQ(t.active_span("g"), std::make_pair(Cycles{0}, Cycles{14}));
    Cycles active = 0;
    for (const TraceCycle& c : t.cycles)
      active += std::count(c.groups.begin(), c.groups.end(), "g");
    EXPECT_EQ(active, 15u);
  }
}

TEST(Sim, WhileOverStaticBodyHasNoCheckCycles) {
  Program p = parse_valid(R"(
    component main() -> () {
      cells { i = std_reg(8); inc = std_add(8); lt = std_lt(8); }
      wires {
        static<2> group body {
          inc.left = i.out;
          inc.right = 8'd1;
          i.in = %1 ? inc.out;
          i.write_en = %1 ? 1'd1;
        }
        lt.left = i.out;
        lt.right = 8'd6;
      }
      control { while lt.out { body; } }
    })");
  Trace t = simulate(p, {}, with_inputs({}, false));
  EXPECT_EQ(t.registers.at("i"), 6u);
  EXPECT_EQ(t.total_cycles, 6u * 2 + 1);
}

TEST(Sim, DynamicInvoke) {
  Program p = parse_valid(R"(
    component double(x: 8) -> (y: 8) {
      cells { r = std_reg(8); a = std_add(8); }
      wires {
        group g { a.left = x; a.right = x; r.in = a.out; r.write_en = 1'd1;
                  g[done] = r.done; }
        y = r.out;
      }
      control { g; }
    }
    component main() -> (o: 8) {
      cells { d = double(); s = std_reg(8); }
      wires {
        group keep { s.in = d.y; s.write_en = 1'd1; keep[done] = s.done; }
        o = d.y;
      }
      control { seq { invoke d(x = 8'd5); keep; invoke d(x = s.out); } }
    })");
  Trace t = simulate(p, {}, with_inputs({}));
  EXPECT_EQ(t.registers.at("s"), 10u);
  EXPECT_EQ(t.final_state.outputs.at("o"), 20u);
}

TEST(Sim, MemoriesInitializedFromJson) {
  Program p = load("kernels/dot.uil");
  MemoryMap init = testing::load_memories("kernels/dot.json");
  Trace t = simulate(p, init);
  uint64_t expect = 0;
  for (size_t i = 0; i < 8; ++i)
    expect += init.at("a").data[i] * init.at("b").data[i];
  EXPECT_EQ(t.final_state.memories.at("result").data[0], expect);
  EXPECT_EQ(t.final_state.memories.at("a"), init.at("a"));
}

TEST(Sim, MemoryInitMustMatchDeclaration) {
  Program p = load("kernels/dot.uil");
  MemoryMap bad = testing::load_memories("kernels/dot.json");
  bad["a"].width = 16;
  EXPECT_EQ(error_kind(p, {}, bad), SimErrorKind::kBadInput);
  MemoryMap unknown{{"nope", Memory{32, 1, {0}}}};
  EXPECT_EQ(error_kind(p, {}, unknown), SimErrorKind::kBadInput);
}

TEST(SimIo, MemoryJsonRoundTrip) {
  MemoryMap m{{"a", Memory{8, 3, {1, 2, 3}}}, {"b", Memory{32, 2, {7, 0}}}};
  EXPECT_EQ(parse_memory_json(memory_json(m)), m);
}

TEST(SimIo, MemoryJsonPadsAndRejects) {
  MemoryMap m = parse_memory_json(
      R"({"memories": {"a": {"width": 8, "size": 4, "data": [1]}}})");
  EXPECT_EQ(m.at("a").data, (std::vector<uint64_t>{1, 0, 0, 0}));
  for (const char* bad :
       {"[", "[]", R"({"memories": 3})",
        R"({"memories": {"a": {"width": 8, "size": 1, "data": [1, 2]}}})",
        R"({"memories": {"a": {"size": 1, "data": [1]}}})"}) {
    try {
      parse_memory_json(bad);
      ADD_FAILURE() << bad;
    } catch (const SimError& e) {
      EXPECT_EQ(e.kind(), SimErrorKind::kBadInput);
    }
  }
}

TEST(SimIo, InputsJson) {
  auto in = parse_inputs_json(R"({"inputs": {"a": 2, "b": 3}})");
  EXPECT_EQ(in.at("a"), 2u);
  EXPECT_EQ(in.at("b"), 3u);
  EXPECT_TRUE(parse_inputs_json(R"({"memories": {}})").empty());
}

TEST(SimIo, TraceHasOneLinePerCyclePlusSummary) {
  Trace t = simulate(load("tests/fixtures/mult_and_store.uil"), {},
                     with_inputs({}));
  std::string jsonl = t.jsonl();
  EXPECT_EQ(std::count(jsonl.begin(), jsonl.end(), '\n'),
            static_cast<long>(t.total_cycles + 1));
  EXPECT_NE(jsonl.find("\"ans=42\""), std::string::npos);
}

TEST(Sim, Deterministic) {
  Program p = load("kernels/triangular.uil");
  MemoryMap init = testing::load_memories("kernels/triangular.json");
  SimOptions o;
  o.record_trace = true;
  EXPECT_EQ(simulate(p, init, o).jsonl(), simulate(p, init, o).jsonl());
}

TEST(Refinement, LoweringPreservesFixtures) {
  for (const char* path : {"tests/fixtures/mult_and_store.uil",
                           "tests/fixtures/compaction.uil",
                           "tests/fixtures/share_static_par.uil"}) {
    Program p = load(path);
    RefinementVerdict v = check_refinement(p, lower(p), {});
    EXPECT_TRUE(v.ok) << path << ": " << v.detail;
  }
}

TEST(Refinement, ReportsMismatch) {
  Program p = load("tests/fixtures/compaction.uil");
  Program q = p;
  auto& g = q.components[0].static_groups[0];
  ASSERT_EQ(g.name, "A");
  g.assignments[0].src = Constant{5, 32};
  RefinementVerdict v = check_refinement(p, q, {});
  EXPECT_FALSE(v.ok);
  EXPECT_FALSE(v.detail.empty());
}

TEST(Sim, StaticMultiplierProductAfterLatency) {
  Program p = parse_valid(R"(
    component main() -> (early: 8, prod: 8) {
      cells { m = std_mult(8); e = std_reg(8); r = std_reg(8); }
      wires {
        static<4> group g {
          m.left = 8'd20; m.right = 8'd13; m.go = %[0:3] ? 1'd1;
          e.in = %[2:3] ? m.out; e.write_en = %[2:3] ? 1'd1;
          r.in = %[3:4] ? m.out; r.write_en = %[3:4] ? 1'd1;
        }
        early = e.out; prod = r.out;
      }
      control { g; }
    })");
  Trace t = simulate(p, {});
  EXPECT_EQ(t.final_state.outputs.at("prod"), (20u * 13u) % 256u);
  EXPECT_NE(t.final_state.outputs.at("early"), (20u * 13u) % 256u);
}

TEST(Sim, NormalizedGuardsKeepTraces) {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    FuzzProgram f = generate_program(seed);
    Program q = f.program;
    for (Component& c : q.components)
      for (StaticGroup& g : c.static_groups) g = normalize_guards(g);
    SimOptions o;
    o.record_trace = true;
    EXPECT_EQ(simulate(f.program, f.init, o).jsonl(), simulate(q, f.init, o).jsonl())
        << seed;
  }
}

}  // namespace
}  // namespace uil
