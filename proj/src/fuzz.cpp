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

#include "uil/fuzz.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <random>
#include <sstream>
#include <thread>

#include "uil/analysis.hpp"
#include "uil/text.hpp"

namespace uil {
namespace {

constexpr int kRegs = 6;
constexpr int kMems = 2;
constexpr uint64_t kMemSize = 8;
constexpr int kMaxLoopDepth = 2;

std::string reg(int r) { return "r" + std::to_string(r); }
std::string mem(int m) { return "m" + std::to_string(m); }
std::string k32(uint64_t v) { return "32'd" + std::to_string(v); }

// Registers a thread may write or read, and memories it owns outright.
struct Scope {
  std::vector<int> writable;
  std::vector<int> readable;
  std::vector<int> mems;
};

class Generator {
 public:
  explicit Generator(uint64_t seed) : rng_(seed) {}

  FuzzProgram run() {
    for (int r = 0; r < kRegs; ++r) cell(reg(r), "std_reg(32)");
    for (int m = 0; m < kMems; ++m)
      cell(mem(m), "std_mem_d1(32, " + std::to_string(kMemSize) + ", 3)");
    Scope top;
    for (int r = 0; r < kRegs; ++r) {
      top.writable.push_back(r);
      top.readable.push_back(r);
    }
    for (int m = 0; m < kMems; ++m) top.mems.push_back(m);
    std::string body;
    int n = static_cast<int>(pick(3, 6));
    for (int i = 0; i < n; ++i) body += control(top, 3, 0, 3);

    std::ostringstream out;
    out << "import \"primitives\";\n\ncomponent main() -> (";
    for (int r = 0; r < kRegs; ++r)
      out << (r ? ", " : "") << "o" << r << ": 32";
    out << ") {\n  cells {\n";
    for (const std::string& c : cells_) out << "    " << c << "\n";
    out << "  }\n  wires {\n";
    for (const std::string& g : groups_) out << g;
    for (int r = 0; r < kRegs; ++r)
      out << "    o" << r << " = " << reg(r) << ".out;\n";
    for (const std::string& c : continuous_) out << "    " << c << "\n";
    out << "  }\n  control {\n    seq {\n" << body << "    }\n  }\n}\n";

    FuzzProgram fp;
    fp.text = out.str();
    fp.program = parse_valid(fp.text, "fuzz");
    for (int m = 0; m < kMems; ++m) {
      Memory mm{32, kMemSize, {}};
      for (uint64_t i = 0; i < kMemSize; ++i) mm.data.push_back(pick(0, 1000));
      fp.init[mem(m)] = std::move(mm);
    }
    return fp;
  }

 private:
  uint64_t pick(uint64_t lo, uint64_t hi) {
    return std::uniform_int_distribution<uint64_t>(lo, hi)(rng_);
  }
  bool chance(int percent) { return pick(0, 99) < uint64_t(percent); }
  template <typename T>
  T one_of(const std::vector<T>& v) {
    return v[pick(0, v.size() - 1)];
  }

  std::string fresh(const std::string& base) {
    return base + std::to_string(next_++);
  }
  void cell(const std::string& name, const std::string& proto) {
    cells_.push_back(name + " = " + proto + ";");
  }
  std::string group(const std::string& name, const std::vector<std::string>& body,
                    std::optional<int> latency = std::nullopt) {
    std::string g = "    ";
    g += latency ? "static<" + std::to_string(*latency) + "> group "
                 : std::string("group ");
    g += name + " {\n";
    for (const std::string& a : body) g += "      " + a + "\n";
    g += "    }\n";
    groups_.push_back(g);
    return name;
  }

  std::string line(const std::string& stmt, int indent) {
    return std::string(6 + 2 * indent, ' ') + stmt + "\n";
  }

  std::string leaf(const Scope& s, int indent) {
    enum { kConst, kBinop, kMult, kDiv, kLoad, kStore, kStaticMult,
           kStaticAdd };
    std::vector<int> options;
    if (!s.writable.empty()) {
      for (int k : {kConst, kBinop, kBinop, kMult, kDiv, kStaticMult,
                    kStaticAdd})
        options.push_back(k);
      if (!s.mems.empty()) options.push_back(kLoad);
    }
    if (!s.mems.empty()) options.push_back(kStore);
    if (options.empty()) return line("seq {}", indent);
    int kind = one_of(options);
    std::string dst = s.writable.empty() ? "" : reg(one_of(s.writable));
    std::string a = reg(one_of(s.readable));
    std::string b = reg(one_of(s.readable));
    std::string g = fresh("g");
    std::vector<std::string> body;
    switch (kind) {
      case kConst:
        body = {dst + ".in = " + k32(pick(0, 50)) + ";",
                dst + ".write_en = 1'd1;", g + "[done] = " + dst + ".done;"};
        break;
      case kBinop: {
        std::string op = one_of<std::string>(
            {"std_add", "std_sub", "std_and", "std_or", "std_xor"});
        std::string c = fresh("alu");
        cell(c, op + "(32)");
        body = {c + ".left = " + a + ".out;", c + ".right = " + b + ".out;",
                dst + ".in = " + c + ".out;", dst + ".write_en = 1'd1;",
                g + "[done] = " + dst + ".done;"};
        break;
      }
      case kMult:
      case kDiv: {
        std::string c = fresh(kind == kMult ? "mul" : "div");
        cell(c, kind == kMult ? "std_mult_pipe(32)" : "std_div(32)");
        body = {c + ".left = " + a + ".out;", c + ".right = " + b + ".out;",
                c + ".go = !" + c + ".done ? 1'd1;",
                dst + ".in = " + c + ".out;",
                dst + ".write_en = " + c + ".done;",
                g + "[done] = " + dst + ".done;"};
        break;
      }
      case kLoad: {
        std::string m = mem(one_of(s.mems));
        body = {m + ".addr0 = 3'd" + std::to_string(pick(0, kMemSize - 1)) +
                    ";",
                dst + ".in = " + m + ".read_data;", dst + ".write_en = 1'd1;",
                g + "[done] = " + dst + ".done;"};
        break;
      }
      case kStore: {
        std::string m = mem(one_of(s.mems));
        body = {m + ".addr0 = 3'd" + std::to_string(pick(0, kMemSize - 1)) +
                    ";",
                m + ".write_data = " + a + ".out;", m + ".write_en = 1'd1;",
                g + "[done] = " + m + ".done;"};
        break;
      }
      case kStaticMult: {
        std::string c = fresh("smul");
        cell(c, "std_mult(32)");
        group(g,
              {c + ".go = %[0:3] ? 1'd1;", c + ".left = %0 ? " + a + ".out;",
               c + ".right = %0 ? " + b + ".out;",
               dst + ".in = %3 ? " + c + ".out;",
               dst + ".write_en = %3 ? 1'd1;"},
              4);
        return line(g + ";", indent);
      }
      case kStaticAdd: {
        std::string c = fresh("sadd");
        cell(c, "std_add(32)");
        group(g,
              {c + ".left = " + a + ".out;", c + ".right = " + b + ".out;",
               dst + ".in = " + c + ".out;", dst + ".write_en = 1'd1;"},
              1);
        return line(g + ";", indent);
      }
    }
    group(g, body);
    return line(g + ";", indent);
  }

  // A 1-bit port comparing `src` against a constant, driven continuously.
  std::string comparison(const std::string& src, uint64_t bound) {
    std::string op = one_of<std::string>({"std_lt", "std_gt", "std_eq"});
    std::string c = fresh("cmp");
    cell(c, op + "(32)");
    continuous_.push_back(c + ".left = " + src + ";");
    continuous_.push_back(c + ".right = " + k32(bound) + ";");
    return c + ".out";
  }

  std::string block(const std::string& head, const std::vector<std::string>& kids,
                    int indent) {
    std::string out = line(head + " {", indent);
    for (const std::string& k : kids) out += k;
    return out + line("}", indent);
  }

  std::string control(const Scope& s, int depth, int indent, int loops_left) {
    if (depth == 0 || chance(35)) return leaf(s, indent);
    int roll = static_cast<int>(pick(0, 99));
    if (roll < 35) {
      std::vector<std::string> kids;
      for (int i = 0, n = int(pick(2, 4)); i < n; ++i)
        kids.push_back(control(s, depth - 1, indent + 1, loops_left));
      return block("seq", kids, indent);
    }
    if (roll < 55 && s.writable.size() >= 2) {
      size_t n = pick(2, std::min<size_t>(3, s.writable.size()));
      std::vector<int> regs = s.writable;
      std::shuffle(regs.begin(), regs.end(), rng_);
      std::vector<Scope> threads(n);
      for (size_t i = 0; i < regs.size(); ++i)
        threads[i % n].writable.push_back(regs[i]);
      for (int m : s.mems) threads[pick(0, n - 1)].mems.push_back(m);
      std::vector<std::string> kids;
      for (Scope& t : threads) {
        t.readable = t.writable;
        for (int r : s.readable)
          if (std::find(s.writable.begin(), s.writable.end(), r) ==
              s.writable.end())
            t.readable.push_back(r);
        kids.push_back(control(t, depth - 1, indent + 1, loops_left));
      }
      return block("par", kids, indent);
    }
    if (roll < 72) {
      std::string cond = comparison(reg(one_of(s.readable)) + ".out",
                                    pick(0, 40));
      std::string out = line("if " + cond + " {", indent);
      out += control(s, depth - 1, indent + 1, loops_left);
      if (chance(60)) {
        out += line("} else {", indent);
        out += control(s, depth - 1, indent + 1, loops_left);
      }
      return out + line("}", indent);
    }
    if (loops_left == 0) return leaf(s, indent);
    if (roll < 88) {
      std::string i = fresh("idx");
      cell(i, "std_reg(32)");
      std::string init = group(fresh("g"), {i + ".in = 32'd0;",
                                            i + ".write_en = 1'd1;",
                                            "@@[done] = " + i + ".done;"});
      fix_done(init);
      std::string add = fresh("inc");
      cell(add, "std_add(32)");
      std::string step = group(
          fresh("g"), {add + ".left = " + i + ".out;", add + ".right = 32'd1;",
                       i + ".in = " + add + ".out;", i + ".write_en = 1'd1;",
                       "@@[done] = " + i + ".done;"});
      fix_done(step);
      std::string cond = fresh("cmp");
      cell(cond, "std_lt(32)");
      continuous_.push_back(cond + ".left = " + i + ".out;");
      continuous_.push_back(cond + ".right = " + k32(pick(1, 3)) + ";");
      std::string body =
          block("seq",
                {control(s, depth - 1, indent + 2, loops_left - 1),
                 line(step + ";", indent + 2)},
                indent + 1);
      return block("seq",
                   {line(init + ";", indent + 1),
                    block("while " + cond + ".out", {body}, indent + 1)},
                   indent);
    }
    return block("repeat " + std::to_string(pick(0, 3)),
                 {control(s, depth - 1, indent + 1, loops_left - 1)}, indent);
  }

  // Replaces the `@@` placeholder with the name of the last group.
  void fix_done(const std::string& name) {
    std::string& g = groups_.back();
    for (size_t at; (at = g.find("@@")) != std::string::npos;)
      g.replace(at, 2, name);
  }

  std::mt19937_64 rng_;
  std::vector<std::string> cells_;
  std::vector<std::string> groups_;
  std::vector<std::string> continuous_;
  int next_ = 0;
};

}  // namespace

FuzzProgram generate_program(uint64_t seed) { return Generator(seed).run(); }

FuzzOutcome check_program(uint64_t seed, const PipelineOptions& opts) {
  FuzzOutcome out;
  out.seed = seed;
  try {
    FuzzProgram fp = generate_program(seed);
    SimOptions sim;
    Trace base = simulate(fp.program, fp.init, sim);
    out.dynamic_cycles = base.total_cycles;
    for (const std::string& name : preset_names()) {
      Program p = run_pipeline(fp.program, *preset_pipeline(name), opts);
      auto diags = validate(p, {.allow_reserved_names = true});
      if (has_errors(diags)) {
        out.detail = name + ": invalid output: " + diags.front().str();
        return out;
      }
      Trace t = simulate(p, fp.init, sim);
      out.preset_cycles[name] = t.total_cycles;
      if (!(t.final_state == base.final_state)) {
        out.detail = name + ": final state differs";
        return out;
      }
      if (t.total_cycles > base.total_cycles) {
        out.detail = name + ": " + std::to_string(t.total_cycles) +
                     " cycles vs " + std::to_string(base.total_cycles) +
                     " dynamic";
        return out;
      }
    }
    out.ok = true;
  } catch (const std::exception& e) {
    out.detail = e.what();
  }
  return out;
}

FuzzSummary run_fuzz(uint64_t seed, uint64_t count, unsigned workers,
                     const PipelineOptions& opts) {
  FuzzSummary summary;
  summary.count = count;
  summary.outcomes.resize(count);
  std::atomic<uint64_t> next{0};
  auto work = [&] {
    for (uint64_t i; (i = next++) < count;)
      summary.outcomes[i] = check_program(seed + i, opts);
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < std::max(1u, workers); ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  for (const FuzzOutcome& o : summary.outcomes)
    if (!o.ok) ++summary.failures;
  return summary;
}

uint64_t default_fuzz_seed() {
  if (const char* env = std::getenv("UIL_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

}  // namespace uil
