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

// Random dynamic programs and a differential check of every preset
// pipeline against the unoptimized original.

#ifndef UIL_FUZZ_HPP_
#define UIL_FUZZ_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "uil/ir.hpp"
#include "uil/pipeline.hpp"
#include "uil/sim.hpp"

namespace uil {

struct FuzzProgram {
  std::string text;
  Program program;
  MemoryMap init;
};

FuzzProgram generate_program(uint64_t seed);

struct FuzzOutcome {
  uint64_t seed = 0;
  bool ok = false;
  Cycles dynamic_cycles = 0;
  std::map<std::string, Cycles> preset_cycles;
  std::string detail;  // first failure, empty when ok
};

// Checks that every preset preserves the final observable state and never
// takes more cycles than the original.
FuzzOutcome check_program(uint64_t seed, const PipelineOptions& opts = {});

struct FuzzSummary {
  uint64_t count = 0;
  uint64_t failures = 0;
  std::vector<FuzzOutcome> outcomes;  // indexed by trial
};

// Trial i uses seed `seed + i`. Results do not depend on `workers`.
FuzzSummary run_fuzz(uint64_t seed, uint64_t count, unsigned workers = 1,
                     const PipelineOptions& opts = {});

// UIL_SEED from the environment, else 1.
uint64_t default_fuzz_seed();

}  // namespace uil

#endif  // UIL_FUZZ_HPP_
