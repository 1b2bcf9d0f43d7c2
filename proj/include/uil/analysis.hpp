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

#ifndef UIL_ANALYSIS_HPP_
#define UIL_ANALYSIS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "uil/ir.hpp"

namespace uil {

struct Diagnostic {
  enum class Severity { kError, kWarning };
  Severity severity = Severity::kError;
  std::string message;
  SourceSpan span;

  std::string str() const;
};

// Structural checks: name resolution, widths, timing bounds, static/dynamic
// composition, combinational cycles. Returns an empty list iff `prog` is well
// formed. Never throws on malformed input.
struct ValidateOptions {
  // Compiler-generated delay groups use a reserved prefix; user input may not.
  bool allow_reserved_names = false;
};
std::vector<Diagnostic> validate(const Program& prog,
                                 const ValidateOptions& opts = {});

bool has_errors(const std::vector<Diagnostic>& diags);

// Lookup used by the latency algebra.
class LatencyEnv {
 public:
  LatencyEnv(const Program& prog, const Component& comp)
      : prog_(prog), comp_(comp) {}

  std::optional<Cycles> group_latency(const std::string& name) const;
  std::optional<Cycles> invoke_latency(const std::string& cell) const;

 private:
  const Program& prog_;
  const Component& comp_;
};

// Latency of a static control node per the static latency algebra:
// seq = sum, par = max, if = max of branches, repeat n = n * body,
// enable = group latency, invoke = callee latency. nullopt for dynamic nodes.
std::optional<Cycles> latency_of(const Control& node, const LatencyEnv& env);

// Makes every timing interval explicit: a missing interval becomes [0, n).
// Idempotent.
StaticGroup normalize_guards(StaticGroup group);

}  // namespace uil

#endif  // UIL_ANALYSIS_HPP_
