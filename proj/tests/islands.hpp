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

// Random static islands with an independently computed latency.

#ifndef UIL_TESTS_ISLANDS_HPP_
#define UIL_TESTS_ISLANDS_HPP_

#include <algorithm>
#include <random>
#include <string>

#include "uil/ir.hpp"

namespace uil::testing {

struct Island {
  std::string text;     // a whole program whose control is the island
  Cycles latency = 0;   // sum / max / max / count * body, computed here
  bool cond = false;    // value to drive on the `c` input
};

class IslandGenerator {
 public:
  explicit IslandGenerator(uint64_t seed) : rng_(seed) {}

  Island next() {
    groups_.clear();
    cells_.clear();
    count_ = 0;
    Island out;
    std::string control;
    out.latency = node(3, control);
    out.cond = pick(0, 1) == 1;
    out.text = "import \"primitives\";\ncomponent main(c: 1) -> () {\n  cells {\n" +
               cells_ + "  }\n  wires {\n" + groups_ + "  }\n  control {\n" +
               control + "\n  }\n}\n";
    return out;
  }

 private:
  uint64_t pick(uint64_t lo, uint64_t hi) {
    return std::uniform_int_distribution<uint64_t>(lo, hi)(rng_);
  }

  Cycles node(int depth, std::string& out) {
    uint64_t kind = depth == 0 ? 0 : pick(0, 4);
    if (kind == 0) {
      std::string g = "g" + std::to_string(count_);
      std::string r = "r" + std::to_string(count_++);
      Cycles n = pick(1, 4);
      std::string last = std::to_string(n - 1) + ":" + std::to_string(n);
      cells_ += "    " + r + " = std_reg(8);\n";
      groups_ += "    static<" + std::to_string(n) + "> group " + g + " { " +
                 r + ".in = %[" + last + "] ? 8'd" + std::to_string(n) + "; " +
                 r + ".write_en = %[" + last + "] ? 1'd1; }\n";
      out += g + ";";
      return n;
    }
    if (kind == 1 || kind == 2) {
      bool seq = kind == 1;
      out += seq ? "static seq { " : "static par { ";
      Cycles total = 0;
      for (uint64_t i = 0, k = pick(2, 3); i < k; ++i) {
        Cycles l = node(depth - 1, out);
        total = seq ? total + l : std::max(total, l);
        out += " ";
      }
      out += "}";
      return total;
    }
    if (kind == 3) {
      out += "static if c { ";
      Cycles t = node(depth - 1, out);
      Cycles e = 0;
      out += " }";
      if (pick(0, 1)) {
        out += " else { ";
        e = node(depth - 1, out);
        out += " }";
      }
      return std::max(t, e);
    }
    Cycles k = pick(1, 3);
    out += "static repeat " + std::to_string(k) + " { ";
    Cycles body = node(depth - 1, out);
    out += " }";
    return k * body;
  }

  std::mt19937_64 rng_;
  std::string groups_;
  std::string cells_;
  int count_ = 0;
};

}  // namespace uil::testing

#endif  // UIL_TESTS_ISLANDS_HPP_
