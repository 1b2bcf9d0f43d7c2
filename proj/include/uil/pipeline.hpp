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

// Named pass sequences over whole programs, plus structural statistics.

#ifndef UIL_PIPELINE_HPP_
#define UIL_PIPELINE_HPP_

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uil/analysis.hpp"
#include "uil/ir.hpp"
#include "uil/lower.hpp"
#include "uil/opt.hpp"

namespace uil {

enum class Pass {
  kInferStatic,
  kStaticPromote,
  kScheduleCompaction,
  kCellShare,
  kCollapseStatic,
  kStaticFsm,
  kStaticWrapper,
};

std::string_view pass_name(Pass pass);
std::optional<Pass> parse_pass(std::string_view name);

struct Pipeline {
  std::string preset;  // "custom" for explicit pass lists
  std::vector<Pass> passes;
};

// Presets B, SH, SC, SH-SC and SC-SH.
std::optional<Pipeline> preset_pipeline(std::string_view name);
const std::vector<std::string>& preset_names();

// Accepts a preset name or a comma-separated list of pass names, where
// `lower` abbreviates the three lowering passes. Throws
// std::invalid_argument on unknown names.
Pipeline parse_pipeline(std::string_view spec);

struct PipelineOptions {
  LowerOptions lower;
  PromotionConfig promote;
  std::function<void(Pass, const Program&)> after_pass;
};

// Warnings from static timing inference are appended to `warnings`.
Program run_pipeline(Program prog, const Pipeline& pipeline,
                     const PipelineOptions& opts = {},
                     std::vector<Diagnostic>* warnings = nullptr);

struct StatsReport {
  static constexpr int kSchema = 1;
  std::string pipeline;
  std::optional<Cycles> cycles;
  uint64_t groups = 0;
  uint64_t static_groups = 0;
  uint64_t fsm_bits = 0;
  std::map<std::string, uint64_t> cells;
  uint64_t cell_count = 0;
  uint64_t wrappers = 0;

  std::string json() const;
};

// Counts over every component of `prog`.
StatsReport collect_stats(const Program& prog, std::string pipeline,
                          std::optional<Cycles> cycles = std::nullopt);

}  // namespace uil

#endif  // UIL_PIPELINE_HPP_
