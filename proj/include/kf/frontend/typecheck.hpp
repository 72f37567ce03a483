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

#include <optional>

#include "kf/frontend/ast.hpp"
#include "kf/frontend/source.hpp"

namespace kf {

// Resolves names and annotates every expression with its type in place.
// Returns all diagnostics; the program is usable iff none is an error.
//
// Rules: no implicit conversions except that an unsuffixed integer literal
// may stand for a uint; builtin calls follow the signature table; pipe, queue
// and buffer parameters are opaque handles.
Diagnostics typecheck(Program& prog);

struct FrontendResult {
  std::optional<Program> program;
  Diagnostics diags;

  bool ok() const { return program.has_value(); }
};

// parse + typecheck.
FrontendResult compile_source(const SourceUnit& src);

}  // namespace kf
