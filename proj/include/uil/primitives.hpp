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

#ifndef UIL_PRIMITIVES_HPP_
#define UIL_PRIMITIVES_HPP_

#include <optional>
#include <string>
#include <vector>

#include "uil/ir.hpp"

namespace uil {

// Behavioural class of each builtin primitive; the simulator dispatches on it.
enum class PrimKind {
  kAdd,
  kSub,
  kAnd,
  kOr,
  kXor,
  kLsh,
  kRsh,
  kLt,
  kGt,
  kEq,
  kNeq,
  kLe,
  kGe,
  kNot,
  kWire,
  kReg,         // std_reg: write_en/done, done one cycle after a write
  kMemD1,       // std_mem_d1: combinational read, registered write
  kMultStatic,  // std_mult: static<3>, go only
  kAddPipe,     // std_add_pipe: static<1>, go only, registered output
  kMultPipe,    // std_mult_pipe: go/done, done exactly 3 cycles after go
  kDiv,         // std_div: go/done, data-dependent latency
};

// The library behind `import "primitives";`.
const std::vector<PrimitiveDecl>& builtin_primitives();
const PrimitiveDecl* find_builtin_primitive(const std::string& name);
std::optional<PrimKind> primitive_kind(const std::string& name);

bool is_combinational(PrimKind kind);

// Cycles taken by std_div for the given dividend/divisor.
Cycles divider_latency(uint64_t dividend, uint64_t divisor);

}  // namespace uil

#endif  // UIL_PRIMITIVES_HPP_
