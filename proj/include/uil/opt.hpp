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


#ifndef UIL_OPT_HPP_
#define UIL_OPT_HPP_

#include <optional>
#include <utility>
#include <vector>

#include "uil/analysis.hpp"
#include "uil/ir.hpp"

namespace uil {

// Latency of a dynamic group whose done is tied to a cell with fixed
// timing whose go is asserted from the start; nullopt when unknown.
std::optional<Cycles> infer_group_latency(const Program& prog,
                                          const Component& comp,
                                          const Group& group);

// Attaches @static(n) hints to groups and control nodes. Existing hints are
// re-derived; disagreements are reported as warnings.
std::vector<Diagnostic> infer_static_timing(const Program& prog,
                                            Component& comp);

// Cycles a dynamic subtree takes under the simulator's handshake model, from
// its @static hints: an enable costs n + 1, an `if` adds one check cycle
// (exact only for balanced branches), a static subtree under dynamic
// control costs its latency plus one. nullopt when any part is unannotated.
std::optional<Cycles> predicted_dynamic_cycles(const Program& prog,
                                               const Component& comp,
                                               const Control& node);

struct PromotionConfig {
  uint64_t threshold = 1;  // minimum group enables + condition ports
  Cycles max_cycles = 4096;
};

// Converts maximal annotated subtrees into static control.
void promote(const Program& prog, Component& comp,
             const PromotionConfig& config = {});

struct Schedule {
  std::vector<Cycles> start;
  Cycles makespan = 0;
};

// As-soon-as-possible start times; `edges` are (before, after) pairs with
// before < after.
Schedule asap_schedule(const std::vector<Cycles>& latency,
                       const std::vector<std::pair<size_t, size_t>>& edges);

// Data dependencies between the children of a static-only seq, at whole-cell
// granularity. nullopt when the children cannot be analysed.
std::optional<std::vector<std::pair<size_t, size_t>>> seq_dependencies(
    const Program& prog, const Component& comp, const Control& seq);

// Rewrites seqs of static children into static pars with delayed threads.
void compact_schedule(const Program& prog, Component& comp);

// Merges cells of identical type whose live ranges never overlap.
void share_cells(const Program& prog, Component& comp);

}  // namespace uil

#endif  // UIL_OPT_HPP_
