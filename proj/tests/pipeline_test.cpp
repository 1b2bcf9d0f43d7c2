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

#include "json.hpp"
#include "test_util.hpp"
#include "uil/pipeline.hpp"
#include "uil/sim.hpp"

namespace uil {
namespace {

using testing::load;
using P = Pass;

std::vector<std::string> names(const Pipeline& p) {
  std::vector<std::string> out;
  for (Pass pass : p.passes) out.emplace_back(pass_name(pass));
  return out;
}

TEST(Pipeline, PresetExpansion) {
  using V = std::vector<std::string>;
  const V lowering{"collapse-static", "static-fsm", "static-wrapper"};
  auto with = [&](V head) {
    head.insert(head.end(), lowering.begin(), lowering.end());
    return head;
  };
  EXPECT_EQ(names(parse_pipeline("B")), lowering);
  EXPECT_EQ(names(parse_pipeline("SH")),
            with({"infer-static", "static-promote", "cell-share"}));
  EXPECT_EQ(names(parse_pipeline("SC")),
            with({"infer-static", "static-promote", "schedule-compaction"}));
  EXPECT_EQ(names(parse_pipeline("SH-SC")),
            with({"infer-static", "static-promote", "cell-share",
                  "schedule-compaction"}));
  EXPECT_EQ(names(parse_pipeline("SC-SH")),
            with({"infer-static", "static-promote", "schedule-compaction",
                  "cell-share"}));
  EXPECT_EQ(preset_names(), (V{"B", "SH", "SC", "SH-SC", "SC-SH"}));
  for (const std::string& n : preset_names())
    EXPECT_EQ(parse_pipeline(n).preset, n);
}

TEST(Pipeline, CustomLists) {
  Pipeline p = parse_pipeline("infer-static,static-promote,lower");
  EXPECT_EQ(p.preset, "custom");
  EXPECT_EQ(p.passes, (std::vector<Pass>{P::kInferStatic, P::kStaticPromote,
                                         P::kCollapseStatic, P::kStaticFsm,
                                         P::kStaticWrapper}));
  EXPECT_EQ(parse_pipeline("cell-share").passes, std::vector<Pass>{P::kCellShare});
  for (Pass pass : {P::kInferStatic, P::kStaticPromote, P::kScheduleCompaction,
                    P::kCellShare, P::kCollapseStatic, P::kStaticFsm,
                    P::kStaticWrapper})
    EXPECT_EQ(parse_pass(pass_name(pass)), pass);
}

TEST(Pipeline, RejectsUnknownNames) {
  EXPECT_THROW(parse_pipeline("fast"), std::invalid_argument);
  EXPECT_THROW(parse_pipeline("infer-static,,lower"), std::invalid_argument);
  EXPECT_THROW(parse_pipeline("sh"), std::invalid_argument);
  EXPECT_EQ(parse_pass("SH"), std::nullopt);
}

TEST(Pipeline, AfterPassHookSeesEveryPass) {
  Program p = load("tests/fixtures/compaction.uil");
  std::vector<Pass> seen;
  PipelineOptions opts;
  opts.after_pass = [&](Pass pass, const Program&) { seen.push_back(pass); };
  Pipeline sc = parse_pipeline("SC");
  run_pipeline(p, sc, opts);
  EXPECT_EQ(seen, sc.passes);
}

TEST(Pipeline, OutputValidates) {
  Program p = load("tests/fixtures/expr.uil");
  for (const std::string& n : preset_names()) {
    Program q = run_pipeline(p, parse_pipeline(n));
    EXPECT_TRUE(validate(q, ValidateOptions{.allow_reserved_names = true}).empty())
        << n;
  }
}

TEST(Stats, JsonSchema) {
  Program p = load("tests/fixtures/comp_seq.uil");
  Program q = run_pipeline(p, parse_pipeline("B"));
  StatsReport r = collect_stats(q, "B", 4);
  auto j = nlohmann::json::parse(r.json());
  EXPECT_EQ(j.at("schema"), 1);
  EXPECT_EQ(j.at("pipeline"), "B");
  EXPECT_EQ(j.at("cycles"), 4);
  EXPECT_EQ(j.at("groups"), 1);
  EXPECT_EQ(j.at("static_groups"), 1);
  EXPECT_EQ(j.at("fsm_bits"), 2);
  EXPECT_EQ(j.at("wrappers"), 1);
  EXPECT_EQ(j.at("cells").at("std_reg"), 4);
  EXPECT_EQ(j.at("cell_count"), 5);
  auto none = nlohmann::json::parse(collect_stats(p, "none").json());
  EXPECT_FALSE(none.contains("cycles"));
  EXPECT_EQ(none.at("fsm_bits"), 0);
}

struct KernelRun {
  std::map<std::string, Cycles> cycles;
  std::map<std::string, Observables> state;
};

KernelRun run_kernel(const std::string& name) {
  Program p = load("kernels/" + name + ".uil");
  MemoryMap init = testing::load_memories("kernels/" + name + ".json");
  KernelRun out;
  Trace base = simulate(p, init);
  out.cycles["none"] = base.total_cycles;
  out.state["none"] = base.final_state;
  for (const std::string& n : preset_names()) {
    Trace t = simulate(run_pipeline(p, parse_pipeline(n)), init);
    out.cycles[n] = t.total_cycles;
    out.state[n] = t.final_state;
  }
  return out;
}

class Kernels : public ::testing::TestWithParam<const char*> {};

TEST_P(Kernels, PresetsAgreeAndImprove) {
  KernelRun r = run_kernel(GetParam());
  for (const auto& [n, s] : r.state) EXPECT_EQ(s, r.state.at("none")) << n;
  EXPECT_LE(r.cycles.at("SH"), r.cycles.at("B"));
  EXPECT_LE(r.cycles.at("SC"), r.cycles.at("SH"));
  EXPECT_LT(r.cycles.at("SC"), r.cycles.at("B"));
  EXPECT_EQ(r.cycles.at("B"), r.cycles.at("none"));
}

INSTANTIATE_TEST_SUITE_P(Pipeline, Kernels,
                         ::testing::Values("dot", "matvec", "stencil2d",
                                           "triangular"));

TEST(Kernels, DotProductResult) {
  Program p = load("kernels/dot.uil");
  MemoryMap init = testing::load_memories("kernels/dot.json");
  int64_t want = 0;
  const auto& a = init.at("a").data;
  const auto& b = init.at("b").data;
  for (size_t i = 0; i < a.size(); ++i) want += a[i] * b[i];
  Trace t = simulate(run_pipeline(p, parse_pipeline("SC")), init);
  EXPECT_EQ(t.final_state.memories.at("result").data.at(0), uint64_t(want));
}

TEST(Kernels, SharedDesignHasNoMoreCells) {
  for (const char* name : {"dot", "matvec", "stencil2d", "triangular"}) {
    Program p = load(std::string("kernels/") + name + ".uil");
    Program shared = run_pipeline(
        p, parse_pipeline("infer-static,static-promote,cell-share"));
    EXPECT_LE(collect_stats(shared, "").cell_count,
              collect_stats(p, "").cell_count)
        << name;
  }
}

}  // namespace
}  // namespace uil
