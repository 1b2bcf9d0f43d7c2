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

#include "json.hpp"
#include "uil/sim.hpp"

namespace uil {

using nlohmann::json;

MemoryMap parse_memory_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SimError(SimErrorKind::kBadInput, 0,
                   std::string("malformed memory JSON: ") + e.what());
  }
  MemoryMap mems;
  if (!doc.is_object() ||
      (doc.contains("memories") && !doc["memories"].is_object()))
    throw SimError(SimErrorKind::kBadInput, 0,
                   "memory JSON needs a \"memories\" object");
  if (!doc.contains("memories")) return mems;
  for (const auto& [name, m] : doc["memories"].items()) {
    try {
      Memory mem;
      mem.width = m.at("width").get<uint32_t>();
      mem.data = m.at("data").get<std::vector<uint64_t>>();
      mem.size = m.contains("size") ? m["size"].get<uint64_t>()
                                    : mem.data.size();
      if (mem.data.size() > mem.size)
        throw SimError(SimErrorKind::kBadInput, 0,
                       "memory '" + name + "' has more data than its size");
      mem.data.resize(mem.size, 0);
      mems[name] = std::move(mem);
    } catch (const json::exception& e) {
      throw SimError(SimErrorKind::kBadInput, 0,
                     "memory '" + name + "': " + e.what());
    }
  }
  return mems;
}

std::map<std::string, uint64_t> parse_inputs_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SimError(SimErrorKind::kBadInput, 0,
                   std::string("malformed memory JSON: ") + e.what());
  }
  std::map<std::string, uint64_t> inputs;
  if (!doc.is_object() || !doc.contains("inputs")) return inputs;
  try {
    inputs = doc["inputs"].get<std::map<std::string, uint64_t>>();
  } catch (const json::exception& e) {
    throw SimError(SimErrorKind::kBadInput, 0,
                   std::string("inputs: ") + e.what());
  }
  return inputs;
}

std::string memory_json(const MemoryMap& mems) {
  json doc;
  doc["memories"] = json::object();
  for (const auto& [name, m] : mems) {
    doc["memories"][name] = {
        {"width", m.width}, {"size", m.size}, {"data", m.data}};
  }
  return doc.dump(2) + "\n";
}

std::string Trace::jsonl() const {
  std::string out;
  for (const TraceCycle& c : cycles) {
    json line = {{"cycle", c.cycle}, {"groups", c.groups},
                 {"writes", c.writes}};
    out += line.dump() + "\n";
  }
  json fin = {{"total_cycles", total_cycles},
              {"outputs", final_state.outputs},
              {"registers", registers}};
  json mems = json::object();
  for (const auto& [name, m] : final_state.memories) mems[name] = m.data;
  fin["memories"] = mems;
  out += fin.dump() + "\n";
  return out;
}

std::string Trace::summary_json() const {
  json doc = json::parse(memory_json(final_state.memories));
  doc["cycles"] = total_cycles;
  doc["outputs"] = final_state.outputs;
  doc["registers"] = registers;
  return doc.dump(2) + "\n";
}

std::optional<std::pair<Cycles, Cycles>> Trace::active_span(
    const std::string& group) const {
  std::optional<std::pair<Cycles, Cycles>> span;
  for (const TraceCycle& c : cycles) {
    for (const std::string& g : c.groups) {
      if (g != group) continue;
      if (!span) span = std::make_pair(c.cycle, c.cycle);
      span->second = c.cycle;
    }
  }
  return span;
}

const char* sim_error_kind_str(SimErrorKind kind) {
  switch (kind) {
    case SimErrorKind::kGuardConflict:
      return "guard conflict";
    case SimErrorKind::kDataRace:
      return "data race";
    case SimErrorKind::kCombDivergence:
      return "combinational divergence";
    case SimErrorKind::kCycleLimit:
      return "cycle limit exceeded";
    case SimErrorKind::kMemoryBounds:
      return "memory access out of bounds";
    case SimErrorKind::kBadInput:
      return "bad input";
  }
  return "unknown";
}

SimError::SimError(SimErrorKind kind, Cycles cycle, const std::string& detail)
    : std::runtime_error(std::string(sim_error_kind_str(kind)) + " at cycle " +
                         std::to_string(cycle) +
                         (detail.empty() ? "" : ": " + detail)),
      kind_(kind),
      cycle_(cycle) {}

}  // namespace uil
