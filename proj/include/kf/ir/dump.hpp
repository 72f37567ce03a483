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

#include "kf/ir/ir.hpp"

namespace kf::ir {

// Deterministic text form of a function; see docs/ir-dump.md.
std::string dump(const Function& f);

// Text of one constant of type `t` with raw bits `bits`.
std::string constant_text(Type t, std::uint32_t bits);

}  // namespace kf::ir
