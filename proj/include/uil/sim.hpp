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


#ifndef UIL_SIM_HPP_
#define UIL_SIM_HPP_

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uil/ir.hpp"

namespace uil {

struct Memory {
  uint32_t width = 32;
  uint64_t size = 0;
  std::vector<uint64_t> data;
  bool operator==(const Memory&) const = default;
};
using MemoryMap = std::map<std::string, Memory>;

// {"memories": {"name": {"width": W, "size": N, "data": [...]}}}
MemoryMap parse_memory_json(const std::string& text);
// The optional {"inputs": {"port": value}} object of the same document.
std::map<std::string, uint64_t> parse_inputs_json(const std::string& text);
std::string memory_json(const MemoryMap& mems);

// State visible from outside the entry component.
struct Observables {
  MemoryMap memories;
  std::map<std::string, uint64_t> outputs;
  bool operator==(const Observables&) const = default;
};

struct TraceCycle {
  Cycles cycle = 0;
  std::vector<std::string> groups;  // groups whose go is high
  std::vector<std::string> writes;  // committed register and memory writes
};

struct Trace {
  std::vector<TraceCycle> cycles;  // empty unless recording is enabled
  Observables final_state;
  std::map<std::string, uint64_t> registers;  // entry-level std_reg values
  Cycles total_cycles = 0;

  std::string jsonl() const;
  // Final memories in the init format, plus cycles, outputs and registers.
  std::string summary_json() const;
  // First and last cycle in which `group` was active, if it ever was.
  std::optional<std::pair<Cycles, Cycles>> active_span(
      const std::string& group) const;
};

struct SimOptions {
  Cycles cycle_limit = 1000000;
  bool record_trace = false;
  std::map<std::string, uint64_t> inputs;  // entry input ports, default 0
};

enum class SimErrorKind {
  kGuardConflict,
  kDataRace,
  kCombDivergence,
  kCycleLimit,
  kMemoryBounds,
  kBadInput,
};
const char* sim_error_kind_str(SimErrorKind kind);

class SimError : public std::runtime_error {
 public:
  SimError(SimErrorKind kind, Cycles cycle, const std::string& detail);
  SimErrorKind kind() const { return kind_; }
  Cycles cycle() const { return cycle_; }

 private:
  SimErrorKind kind_;
  Cycles cycle_;
};

// Runs the entry component with its go held high until its control
// finishes. Memories of the entry component start from `init` (zero when
// absent).
Trace simulate(const Program& prog, const MemoryMap& init,
               const SimOptions& opts = {});

struct RefinementVerdict {
  bool ok = false;
  Cycles original_cycles = 0;
  Cycles refined_cycles = 0;
  std::string detail;  // first mismatch, empty when ok
};

// Throws SimError prefixed with the side that failed.
RefinementVerdict check_refinement(const Program& original,
                                   const Program& refined,
                                   const MemoryMap& init,
                                   const SimOptions& opts = {});

}  // namespace uil

#endif  // UIL_SIM_HPP_
