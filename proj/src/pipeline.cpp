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

#include "uil/pipeline.hpp"

#include <array>
#include <stdexcept>

#include "json.hpp"

namespace uil {
namespace {

constexpr std::array<std::pair<Pass, std::string_view>, 7> kPassNames{{
    {Pass::kInferStatic, "infer-static"},
    {Pass::kStaticPromote, "static-promote"},
    {Pass::kScheduleCompaction, "schedule-compaction"},
    {Pass::kCellShare, "cell-share"},
    {Pass::kCollapseStatic, "collapse-static"},
    {Pass::kStaticFsm, "static-fsm"},
    {Pass::kStaticWrapper, "static-wrapper"},
}};

std::vector<Pass> with_lowering(std::vector<Pass> passes) {
  passes.push_back(Pass::kCollapseStatic);
  passes.push_back(Pass::kStaticFsm);
  passes.push_back(Pass::kStaticWrapper);
  return passes;
}

}  // namespace

std::string_view pass_name(Pass pass) {
  for (const auto& [p, name] : kPassNames)
    if (p == pass) return name;
  return "?";
}

std::optional<Pass> parse_pass(std::string_view name) {
  for (const auto& [p, n] : kPassNames)
    if (n == name) return p;
  return std::nullopt;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"B", "SH", "SC", "SH-SC",
                                              "SC-SH"};
  return names;
}

std::optional<Pipeline> preset_pipeline(std::string_view name) {
  using P = Pass;
  if (name == "B") return Pipeline{"B", with_lowering({})};
  if (name == "SH")
    return Pipeline{
        "SH", with_lowering({P::kInferStatic, P::kStaticPromote, P::kCellShare})};
  if (name == "SC")
    return Pipeline{"SC", with_lowering({P::kInferStatic, P::kStaticPromote,
                                         P::kScheduleCompaction})};
  if (name == "SH-SC")
    return Pipeline{"SH-SC",
                    with_lowering({P::kInferStatic, P::kStaticPromote,
                                   P::kCellShare, P::kScheduleCompaction})};
  if (name == "SC-SH")
    return Pipeline{"SC-SH",
                    with_lowering({P::kInferStatic, P::kStaticPromote,
                                   P::kScheduleCompaction, P::kCellShare})};
  return std::nullopt;
}

Pipeline parse_pipeline(std::string_view spec) {
  if (auto p = preset_pipeline(spec)) return *p;
  Pipeline out{"custom", {}};
  size_t start = 0;
  while (start <= spec.size()) {
    size_t comma = spec.find(',', start);
    if (comma == std::string_view::npos) comma = spec.size();
    std::string_view name = spec.substr(start, comma - start);
    if (name == "lower") {
      out.passes = with_lowering(std::move(out.passes));
    } else if (auto pass = parse_pass(name)) {
      out.passes.push_back(*pass);
    } else {
      throw std::invalid_argument("unknown pass or preset '" +
                                  std::string(name) + "'");
    }
    start = comma + 1;
  }
  return out;
}

Program run_pipeline(Program prog, const Pipeline& pipeline,
                     const PipelineOptions& opts,
                     std::vector<Diagnostic>* warnings) {
  for (Pass pass : pipeline.passes) {
    const Program lookup = prog;
    for (Component& comp : prog.components) {
      switch (pass) {
        case Pass::kInferStatic: {
          auto w = infer_static_timing(lookup, comp);
          if (warnings) warnings->insert(warnings->end(), w.begin(), w.end());
          break;
        }
        case Pass::kStaticPromote:
          promote(lookup, comp, opts.promote);
          break;
        case Pass::kScheduleCompaction:
          compact_schedule(lookup, comp);
          break;
        case Pass::kCellShare:
          share_cells(lookup, comp);
          break;
        case Pass::kCollapseStatic:
          collapse_static_control(lookup, comp);
          break;
        case Pass::kStaticFsm:
          instantiate_fsms(lookup, comp);
          break;
        case Pass::kStaticWrapper:
          insert_wrappers(lookup, comp, opts.lower);
          break;
      }
    }
    if (opts.after_pass) opts.after_pass(pass, prog);
  }
  return prog;
}

std::string StatsReport::json() const {
  nlohmann::ordered_json j;
  j["schema"] = kSchema;
  j["pipeline"] = pipeline;
  if (cycles) j["cycles"] = *cycles;
  j["groups"] = groups;
  j["static_groups"] = static_groups;
  j["fsm_bits"] = fsm_bits;
  j["cells"] = cells;
  j["cell_count"] = cell_count;
  j["wrappers"] = wrappers;
  return j.dump();
}

StatsReport collect_stats(const Program& prog, std::string pipeline,
                          std::optional<Cycles> cycles) {
  StatsReport r;
  r.pipeline = std::move(pipeline);
  r.cycles = cycles;
  for (const Component& comp : prog.components) {
    r.groups += comp.groups.size();
    r.static_groups += comp.static_groups.size();
    for (const Cell& cell : comp.cells) {
      ++r.cells[cell.prototype];
      ++r.cell_count;
    }
    for (const StaticGroup& g : comp.static_groups) {
      if (auto fsm = find_fsm(comp, g.name)) {
        const Cell* cell = comp.find_cell(*fsm);
        if (cell && !cell->args.empty()) r.fsm_bits += cell->args[0];
      }
    }
    for (const Group& g : comp.groups)
      if (g.attrs.count(kWrapperAttr)) ++r.wrappers;
  }
  return r;
}

}  // namespace uil
