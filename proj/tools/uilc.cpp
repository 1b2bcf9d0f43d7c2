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

// uilc: parse, validate, optimize, lower, simulate and fuzz UIL programs.
//
// Exit status: 0 success, 1 diagnostics, 2 simulation error or fuzz
// mismatch, 64 usage error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "uil/analysis.hpp"
#include "uil/fuzz.hpp"
#include "uil/pipeline.hpp"
#include "uil/sim.hpp"
#include "uil/text.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDiagnostics = 1;
constexpr int kExitSimulation = 2;
constexpr int kExitUsage = 64;

struct Failure {
  int code;
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitDiagnostics, path + ": cannot read file"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{kExitDiagnostics, path + ": cannot write file"};
  out << text;
}

void print_diagnostics(const std::vector<uil::Diagnostic>& diags) {
  for (const uil::Diagnostic& d : diags) std::cerr << d.str() << "\n";
}

uil::Program load(const std::string& path) {
  uil::ParseResult r = uil::parse(read_file(path), path);
  if (!r.ok()) {
    print_diagnostics(r.diagnostics);
    throw Failure{kExitDiagnostics, ""};
  }
  auto diags = uil::validate(*r.program);
  print_diagnostics(diags);
  if (uil::has_errors(diags)) throw Failure{kExitDiagnostics, ""};
  return std::move(*r.program);
}

struct PipelineFlags {
  std::string pipeline;
  std::string emit;
  bool no_while_fastpath = false;
  uint64_t promote_threshold = uil::PromotionConfig{}.threshold;
  uint64_t promote_max_cycles = uil::PromotionConfig{}.max_cycles;

  void add(CLI::App* app, const std::string& default_pipeline) {
    pipeline = default_pipeline;
    app->add_option("--pipeline", pipeline,
                    "preset (B, SH, SC, SH-SC, SC-SH) or comma-separated "
                    "passes")
        ->capture_default_str();
    app->add_flag("--no-while-fastpath", no_while_fastpath,
                  "lower while loops over static bodies with the generic "
                  "wrapper");
    app->add_option("--promote-threshold", promote_threshold,
                    "minimum control size for static promotion")
        ->capture_default_str();
    app->add_option("--promote-max-cycles", promote_max_cycles,
                    "largest latency static promotion may introduce")
        ->capture_default_str();
  }

  uil::PipelineOptions options() const {
    uil::PipelineOptions opts;
    opts.lower.while_fastpath = !no_while_fastpath;
    opts.promote.threshold = promote_threshold;
    opts.promote.max_cycles = promote_max_cycles;
    return opts;
  }

  uil::Pipeline parsed() const {
    if (pipeline.empty() || pipeline == "none") return {"none", {}};
    try {
      return uil::parse_pipeline(pipeline);
    } catch (const std::invalid_argument& e) {
      throw Failure{kExitUsage, e.what()};
    }
  }

  // Runs the pipeline, stopping after the pass named by `--emit` if given.
  uil::Program run(const uil::Program& prog) const {
    uil::Pipeline p = parsed();
    uil::PipelineOptions opts = options();
    if (!emit.empty()) {
      const std::string prefix = "after:";
      if (emit.rfind(prefix, 0) != 0)
        throw Failure{kExitUsage, "--emit expects after:<pass>"};
      auto pass = uil::parse_pass(emit.substr(prefix.size()));
      if (!pass) throw Failure{kExitUsage, "unknown pass in --emit: " + emit};
      auto it = std::find(p.passes.begin(), p.passes.end(), *pass);
      if (it == p.passes.end())
        throw Failure{kExitUsage, "pass '" + emit.substr(prefix.size()) +
                                      "' is not in pipeline " + p.preset};
      p.passes.erase(it + 1, p.passes.end());
    }
    std::vector<uil::Diagnostic> warnings;
    uil::Program out = uil::run_pipeline(prog, p, opts, &warnings);
    print_diagnostics(warnings);
    auto diags = uil::validate(out, {.allow_reserved_names = true});
    if (uil::has_errors(diags)) {
      print_diagnostics(diags);
      throw Failure{kExitDiagnostics, "pipeline produced an invalid program"};
    }
    return out;
  }
};

struct SimFlags {
  std::string data;
  uint64_t cycle_limit = uil::SimOptions{}.cycle_limit;
  std::vector<std::string> inputs;

  void add(CLI::App* app) {
    app->add_option("--data", data, "memory and input JSON");
    app->add_option("--cycle-limit", cycle_limit, "abort after N cycles")
        ->capture_default_str();
    app->add_option("--input", inputs, "entry input port value, name=value");
  }

  std::pair<uil::MemoryMap, uil::SimOptions> load() const {
    uil::MemoryMap init;
    uil::SimOptions opts;
    opts.cycle_limit = cycle_limit;
    if (!data.empty()) {
      std::string text = read_file(data);
      init = uil::parse_memory_json(text);
      opts.inputs = uil::parse_inputs_json(text);
    }
    for (const std::string& kv : inputs) {
      size_t eq = kv.find('=');
      if (eq == std::string::npos)
        throw Failure{kExitUsage, "--input expects name=value, got " + kv};
      try {
        opts.inputs[kv.substr(0, eq)] = std::stoull(kv.substr(eq + 1), nullptr, 0);
      } catch (const std::exception&) {
        throw Failure{kExitUsage, "bad value in --input " + kv};
      }
    }
    return {std::move(init), std::move(opts)};
  }
};

int run(int argc, char** argv) {
  CLI::App app{"UIL compiler and simulator"};
  app.require_subcommand(1);

  std::string input;
  std::string output;

  CLI::App* compile = app.add_subcommand("compile", "run a pipeline, print IL");
  PipelineFlags compile_flags;
  compile->add_option("file", input, "input .uil file")->required();
  compile->add_option("-o,--output", output, "output file (default stdout)");
  compile_flags.add(compile, "B");
  compile->add_option("--emit", compile_flags.emit,
                      "print the program after:<pass> instead");

  CLI::App* sim = app.add_subcommand("sim", "simulate, print final state");
  PipelineFlags sim_pipeline;
  SimFlags sim_flags;
  std::string trace_path;
  sim->add_option("file", input, "input .uil file")->required();
  sim->add_option("-o,--output", output, "final state file (default stdout)");
  sim->add_option("--trace", trace_path, "write a JSON-lines cycle trace");
  sim_pipeline.add(sim, "none");
  sim_flags.add(sim);

  CLI::App* stats = app.add_subcommand("stats", "structural statistics");
  PipelineFlags stats_pipeline;
  SimFlags stats_sim;
  bool stats_json = false;
  bool stats_simulate = false;
  stats->add_option("file", input, "input .uil file")->required();
  stats_pipeline.add(stats, "B");
  stats_sim.add(stats);
  stats->add_flag("--simulate", stats_simulate,
                  "report cycles (implied by --data)");
  stats->add_flag("--json", stats_json, "emit a JSON report");

  CLI::App* fuzz = app.add_subcommand("fuzz", "differential refinement fuzz");
  uint64_t seed = uil::default_fuzz_seed();
  uint64_t count = 100;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  bool verbose = false;
  fuzz->add_option("--seed", seed, "first seed (default $UIL_SEED or 1)")
      ->capture_default_str();
  fuzz->add_option("--count", count, "number of programs")
      ->capture_default_str();
  fuzz->add_option("-j,--jobs", jobs, "worker threads")->capture_default_str();
  fuzz->add_flag("-v,--verbose", verbose, "print every trial");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*compile) {
      uil::Program out = compile_flags.run(load(input));
      write_output(output, uil::print(out));
    } else if (*sim) {
      uil::Program prog = sim_pipeline.run(load(input));
      auto [init, opts] = sim_flags.load();
      opts.record_trace = !trace_path.empty();
      uil::Trace t = uil::simulate(prog, init, opts);
      if (!trace_path.empty()) write_output(trace_path, t.jsonl());
      write_output(output, t.summary_json());
    } else if (*stats) {
      uil::Program prog = stats_pipeline.run(load(input));
      std::optional<uil::Cycles> cycles;
      if (stats_simulate || !stats_sim.data.empty()) {
        auto [init, opts] = stats_sim.load();
        cycles = uil::simulate(prog, init, opts).total_cycles;
      }
      uil::StatsReport r =
          uil::collect_stats(prog, stats_pipeline.parsed().preset, cycles);
      if (stats_json) {
        std::cout << r.json() << "\n";
      } else {
        std::cout << "pipeline      " << r.pipeline << "\n";
        if (r.cycles) std::cout << "cycles        " << *r.cycles << "\n";
        std::cout << "groups        " << r.groups << "\n"
                  << "static groups " << r.static_groups << "\n"
                  << "fsm bits      " << r.fsm_bits << "\n"
                  << "wrappers      " << r.wrappers << "\n"
                  << "cells         " << r.cell_count << "\n";
        for (const auto& [proto, n] : r.cells)
          std::cout << "  " << proto << " " << n << "\n";
      }
    } else if (*fuzz) {
      uil::FuzzSummary s = uil::run_fuzz(seed, count, jobs);
      for (const uil::FuzzOutcome& o : s.outcomes) {
        if (!o.ok) {
          std::cout << "seed " << o.seed << ": FAIL " << o.detail << "\n";
        } else if (verbose) {
          std::cout << "seed " << o.seed << ": ok dynamic=" << o.dynamic_cycles;
          for (const auto& [name, c] : o.preset_cycles)
            std::cout << " " << name << "=" << c;
          std::cout << "\n";
        }
      }
      std::cout << (s.count - s.failures) << "/" << s.count
                << " programs preserved (seeds " << seed << ".."
                << seed + count - 1 << ")\n";
      return s.failures == 0 ? kExitOk : kExitSimulation;
    }
  } catch (const Failure& f) {
    if (!f.message.empty()) std::cerr << "uilc: " << f.message << "\n";
    return f.code;
  } catch (const uil::SimError& e) {
    std::cerr << "uilc: " << e.what() << "\n";
    return kExitSimulation;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
