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


#ifndef UIL_LOWER_HPP_
#define UIL_LOWER_HPP_

#include "uil/ir.hpp"

namespace uil {

struct LowerOptions {
  // Compile `while c { G }` over a static body into one group whose done
  // condition checks `c` at iteration boundaries.
  bool while_fastpath = true;
};

// Replaces every maximal static control subtree with a single static group.
void collapse_static_control(const Program& prog, Component& comp);

// Replaces timing intervals with guards over per-group counter registers.
void instantiate_fsms(const Program& prog, Component& comp);

// Gives each static group enabled from dynamic control a go/done interface.
void insert_wrappers(const Program& prog, Component& comp,
                     const LowerOptions& opts = {});

// All three stages over every component.
Program lower(Program prog, const LowerOptions& opts = {});

// Counter register that `instantiate_fsms` attached to `group`, if any.
std::optional<std::string> find_fsm(const Component& comp,
                                    const std::string& group);

// Removes static groups that no control node or hole references.
void remove_unused_static_groups(Component& comp);

}  // namespace uil

#endif  // UIL_LOWER_HPP_
