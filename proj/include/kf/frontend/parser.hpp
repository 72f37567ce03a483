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

struct ParseResult {
  std::optional<Program> program;
  Diagnostics diags;

  bool ok() const { return program.has_value(); }
};

// Parses MiniCL source. Never throws; failures are reported as diagnostics
// carrying the line and column of the offending token.
ParseResult parse(const SourceUnit& src);

}  // namespace kf
