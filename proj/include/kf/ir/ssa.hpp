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

#include <string>
#include <vector>

#include "kf/ir/ir.hpp"

namespace kf::ir {

// Rewrites variable loads/stores into SSA values with phi nodes placed on the
// iterated dominance frontier. Phis without a non-phi use are removed.
void to_ssa(Function& f);

struct SsaViolation {
  // One of: definition, dominance, phi, terminator, maximality, entry,
  // unreachable, pre-ssa.
  std::string kind;
  BlockId block = kNoBlock;
  ValueId value = kNoValue;
  std::string message;
};

// Checks single definition, def-dominates-use, phi/predecessor agreement,
// terminators and block maximality. Blocks that end in a sync are exempt from
// the maximality rule.
std::vector<SsaViolation> verify_ssa(const Function& f);

}  // namespace kf::ir
