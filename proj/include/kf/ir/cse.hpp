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

#include <cstddef>

#include "kf/ir/ir.hpp"

namespace kf::ir {

// Block-local common subexpression elimination over pure instructions.
// Two loads of the same buffer and index also merge when no store lies
// between them in the block.
// Returns the number of instructions removed. Idempotent.
std::size_t run_cse(Function& f);

}  // namespace kf::ir
