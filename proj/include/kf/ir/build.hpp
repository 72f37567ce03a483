// Copyright 2026 The KernelForge Authors
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

#pragma once

#include "kf/frontend/ast.hpp"
#include "kf/ir/ir.hpp"

namespace kf::ir {

// Lowers a type-checked kernel to a CFG of maximal basic blocks. Local
// variables are accessed through kVarLoad/kVarStore; scalar parameters
// through kArg. Barriers and work-group functions end their block.
Function build_cfg(const Program& prog, const KernelDecl& kernel);

// Merges every edge A->B where A has one successor, B has one predecessor,
// B is not the entry and A does not end in a sync, then drops unreachable
// blocks and renumbers in reverse post-order.
void merge_blocks(Function& f);

}  // namespace kf::ir
