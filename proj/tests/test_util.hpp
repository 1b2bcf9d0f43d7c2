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

// Shared helpers for the test binaries.

#ifndef UIL_TESTS_TEST_UTIL_HPP_
#define UIL_TESTS_TEST_UTIL_HPP_

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "uil/sim.hpp"
#include "uil/text.hpp"

namespace uil::testing {

inline std::string source_path(const std::string& rel) {
  return std::string(UIL_SOURCE_DIR) + "/" + rel;
}

inline std::string read_source(const std::string& rel) {
  std::ifstream in(source_path(rel), std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + rel);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Program load(const std::string& rel) {
  return parse_valid(read_source(rel), rel);
}

inline MemoryMap load_memories(const std::string& rel) {
  return parse_memory_json(read_source(rel));
}

// Collapses runs of whitespace so listings compare by tokens.
inline std::string squash(const std::string& s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (c == ' ' || c == '\n' || c == '\t' || c == '\r') {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

}  // namespace uil::testing

#endif  // UIL_TESTS_TEST_UTIL_HPP_
