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


#ifndef UIL_TEXT_HPP_
#define UIL_TEXT_HPP_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "uil/analysis.hpp"
#include "uil/ir.hpp"

namespace uil {

struct ParseResult {
  std::optional<Program> program;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return program.has_value(); }
};

// Parses `.uil` text. Unknown prototypes are left for `validate`.
ParseResult parse(std::string_view text, const std::string& file = "<input>");

// Parses and validates, throwing std::runtime_error with all diagnostics.
Program parse_valid(std::string_view text,
                    const std::string& file = "<input>");

std::string print(const Program& prog);
std::string print_component(const Program& prog, const Component& comp);
std::string print_control(const Control& control, int indent = 0);
std::string print_guard(const Guard& guard);
std::string print_assignment(const Assignment& a);

}  // namespace uil

#endif  // UIL_TEXT_HPP_
